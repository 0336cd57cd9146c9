#ifndef SENSEBRIDGE_PAIRGEN_HPP
#define SENSEBRIDGE_PAIRGEN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sensebridge/corpus.hpp"

namespace sensebridge {

// One binary-classification unit for the scorer: does `gloss` describe the
// usage in `example_text`?
struct LabeledPair {
    std::string word;
    std::string example_text;
    std::string gloss;
    int label = 0; // 1 iff source_sense_id is the gold sense of source_usage_id
    std::string source_usage_id;
    std::string source_sense_id;

    bool operator==(const LabeledPair&) const = default;
};

struct PairDataset {
    std::vector<LabeledPair> pairs;
    Language language = Language::fi;
};

struct PositiveResult {
    std::vector<LabeledPair> pairs;
    std::size_t skipped_without_gloss = 0; // annotated usages whose sense has no gloss anywhere
};

// One label-1 pair per annotated usage, pairing its example with its gold
// gloss. Periods are ignored: old and new annotations contribute alike.
PositiveResult positive_pairs(const DatasetSplit& split);

// Hard negatives: for every word with at least two distinct sense IDs, each
// sense's gloss is combined with every annotated usage of the word's *other*
// senses. Words with a single sense contribute nothing; unannotated usages
// are never used.
std::vector<LabeledPair> negative_pairs(const DatasetSplit& split);

// Positives + negatives, deduplicated on (example_text, gloss, label),
// canonically ordered and then shuffled with `seed`. The result depends only
// on the split's content, not on its row order.
PairDataset build_training_set(const DatasetSplit& split, std::uint64_t seed);

// Deterministic pair-level split for building a dev set where no separate
// split file exists. dev_fraction in [0,1); at least one pair stays in train.
std::pair<PairDataset, PairDataset> split_pairs(const PairDataset& dataset, double dev_fraction,
                                                std::uint64_t seed);

// Inspection/training dump: columns word, example, gloss, label.
void save_pairs(const PairDataset& dataset, const std::string& path);
PairDataset load_pairs(const std::string& path, Language language);

} // namespace sensebridge

#endif
