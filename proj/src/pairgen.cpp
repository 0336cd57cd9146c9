#include "sensebridge/pairgen.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "sensebridge/error.hpp"
#include "sensebridge/rng.hpp"
#include "sensebridge/tsv.hpp"

namespace sensebridge {

namespace {

// Per-word view used by both pair generators: one gloss per distinct sense ID
// (old-period entry preferred) and the annotated usages grouped by sense.
struct WordSenses {
    // sense_id -> gloss, insertion-ordered by first appearance in the split
    std::vector<std::pair<std::string, std::string>> glosses;
    // annotated usages of the word, in file order
    std::vector<const UsageExample*> usages;
};

std::map<std::string, WordSenses> collect(const DatasetSplit& split) {
    std::map<std::string, WordSenses> words;
    for (const auto& sense : split.senses) {
        auto& entry = words[sense.word];
        auto it = std::find_if(entry.glosses.begin(), entry.glosses.end(),
                               [&](const auto& g) { return g.first == sense.sense_id; });
        if (it == entry.glosses.end()) {
            entry.glosses.emplace_back(sense.sense_id, sense.gloss);
        } else if (sense.period == Period::Old) {
            it->second = sense.gloss;
        }
    }
    for (const auto& usage : split.usages) {
        if (usage.sense_id) words[usage.word].usages.push_back(&usage);
    }
    return words;
}

} // namespace

PositiveResult positive_pairs(const DatasetSplit& split) {
    PositiveResult result;
    for (const auto& usage : split.usages) {
        if (!usage.sense_id) continue;
        auto gloss = gloss_for(split, usage.word, *usage.sense_id);
        if (!gloss) {
            ++result.skipped_without_gloss;
            continue;
        }
        result.pairs.push_back(
            {usage.word, usage.example_text, *gloss, 1, usage.usage_id, *usage.sense_id});
    }
    return result;
}

std::vector<LabeledPair> negative_pairs(const DatasetSplit& split) {
    std::vector<LabeledPair> pairs;
    for (const auto& [word, senses] : collect(split)) {
        // distinct sense IDs of the word: glossed senses plus any sense IDs
        // seen only on usages (referential integrity normally rules those out)
        std::set<std::string> distinct;
        for (const auto& [sense_id, gloss] : senses.glosses) distinct.insert(sense_id);
        for (const UsageExample* usage : senses.usages) distinct.insert(*usage->sense_id);
        if (distinct.size() < 2) continue;

        for (const auto& [sense_id, gloss] : senses.glosses) {
            for (const UsageExample* usage : senses.usages) {
                if (*usage->sense_id == sense_id) continue;
                pairs.push_back({word, usage->example_text, gloss, 0, usage->usage_id, sense_id});
            }
        }
    }
    return pairs;
}

PairDataset build_training_set(const DatasetSplit& split, std::uint64_t seed) {
    PairDataset dataset;
    dataset.language = split.language;

    std::vector<LabeledPair> all = positive_pairs(split).pairs;
    std::vector<LabeledPair> negatives = negative_pairs(split);
    all.insert(all.end(), negatives.begin(), negatives.end());

    // Canonical order makes the result independent of input row order; the
    // seeded shuffle then fixes the final order from the seed alone.
    auto key = [](const LabeledPair& p) {
        return std::tie(p.example_text, p.gloss, p.label, p.word, p.source_usage_id,
                        p.source_sense_id);
    };
    std::sort(all.begin(), all.end(),
              [&](const LabeledPair& a, const LabeledPair& b) { return key(a) < key(b); });
    all.erase(std::unique(all.begin(), all.end(),
                          [](const LabeledPair& a, const LabeledPair& b) {
                              return a.example_text == b.example_text && a.gloss == b.gloss &&
                                     a.label == b.label;
                          }),
              all.end());

    Rng rng(seed);
    rng.shuffle(all);
    dataset.pairs = std::move(all);
    return dataset;
}

std::pair<PairDataset, PairDataset> split_pairs(const PairDataset& dataset, double dev_fraction,
                                                std::uint64_t seed) {
    if (dev_fraction < 0.0 || dev_fraction >= 1.0) {
        throw UsageError("dev_fraction must be in [0, 1)");
    }
    std::vector<std::size_t> order(dataset.pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    std::size_t dev_count = static_cast<std::size_t>(dev_fraction * dataset.pairs.size());
    if (dev_count >= dataset.pairs.size() && !dataset.pairs.empty()) {
        dev_count = dataset.pairs.size() - 1;
    }

    PairDataset train{.pairs = {}, .language = dataset.language};
    PairDataset dev{.pairs = {}, .language = dataset.language};
    for (std::size_t i = 0; i < order.size(); ++i) {
        (i < dev_count ? dev : train).pairs.push_back(dataset.pairs[order[i]]);
    }
    return {std::move(train), std::move(dev)};
}

namespace {
const std::vector<std::string> kPairHeader = {"word", "example", "gloss", "label"};
}

void save_pairs(const PairDataset& dataset, const std::string& path) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(dataset.pairs.size());
    for (const auto& pair : dataset.pairs) {
        rows.push_back({pair.word, pair.example_text, pair.gloss, std::to_string(pair.label)});
    }
    tsv::write_file(path, kPairHeader, rows);
}

PairDataset load_pairs(const std::string& path, Language language) {
    tsv::Table table = tsv::read_file(path);
    if (table.header != kPairHeader) {
        throw ParseError(path + ": unexpected header; expected word, example, gloss, label");
    }
    PairDataset dataset;
    dataset.language = language;
    dataset.pairs.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        const std::string& label = row.fields[3];
        if (label != "0" && label != "1") {
            throw ValidationError(path + ":" + std::to_string(row.line_number) +
                                  ": label must be 0 or 1");
        }
        dataset.pairs.push_back({row.fields[0], row.fields[1], row.fields[2],
                                 label == "1" ? 1 : 0, "", ""});
    }
    return dataset;
}

} // namespace sensebridge
