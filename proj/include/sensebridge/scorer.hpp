#ifndef SENSEBRIDGE_SCORER_HPP
#define SENSEBRIDGE_SCORER_HPP

#include <memory>
#include <string>
#include <vector>

#include "sensebridge/corpus.hpp"

namespace sensebridge {

// Example text and gloss joined by a single tab, the delimiter the pair
// classifier is trained on. Internal tabs of either side are replaced by
// spaces first, so the text always splits back into exactly two parts.
class ScorerInput {
public:
    const std::string& text() const { return text_; }
    std::string example_text() const;
    std::string gloss() const;

private:
    friend ScorerInput encode_pair(const std::string& example_text, const std::string& gloss);
    explicit ScorerInput(std::string text) : text_(std::move(text)) {}
    std::string text_;
};

// Throws UsageError when either side is empty.
ScorerInput encode_pair(const std::string& example_text, const std::string& gloss);

// P(gloss correctly describes the usage) for each input pair. Implementations
// are deterministic and stateless across calls; concurrent score_batch calls
// on one instance are safe.
class Scorer {
public:
    virtual ~Scorer() = default;
    virtual std::vector<double> score_batch(const std::vector<ScorerInput>& batch) const = 0;
    virtual std::string describe() const = 0;
};

// Jaccard overlap of lowercased whitespace token sets; 0 when both sides are
// effectively empty. Deterministic test backend.
std::unique_ptr<Scorer> mock_overlap_scorer();

// 1.0 exactly when the pair's gloss is a gold gloss of the usage text in
// `gold` (exact text lookup), else 0.0. End-to-end test backend.
std::unique_ptr<Scorer> oracle_scorer(const DatasetSplit& gold);

// Trained pair classifier restored from a checkpoint directory.
std::unique_ptr<Scorer> neural_scorer(const std::string& checkpoint_dir);

} // namespace sensebridge

#endif
