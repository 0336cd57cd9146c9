#ifndef SENSEBRIDGE_CORPUS_HPP
#define SENSEBRIDGE_CORPUS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sensebridge {

enum class Language { fi, ru, de };

Language parse_language(const std::string& code);
std::string to_string(Language language);

enum class Period { Old, New };

Period parse_period(const std::string& token); // throws ValidationError on anything but "old"/"new"
std::string to_string(Period period);

// One dated attestation of a target word.
struct UsageExample {
    std::string usage_id;
    std::string word;
    std::string example_text;
    std::optional<std::string> sense_id; // absent on unannotated rows
    Period period = Period::Old;
    std::optional<std::string> date; // raw, uninterpreted

    bool operator==(const UsageExample&) const = default;
};

// A (sense ID, gloss) entry of a word in one period.
struct SenseDefinition {
    std::string sense_id;
    std::string word;
    std::string gloss;
    Period period = Period::Old;

    bool operator==(const SenseDefinition&) const = default;
};

struct DatasetSplit {
    Language language = Language::fi;
    std::vector<UsageExample> usages;  // file order
    std::vector<SenseDefinition> senses; // first-appearance order

    bool operator==(const DatasetSplit&) const = default;
};

// The old-period senses of one word, in first-appearance order.
struct SenseInventory {
    std::string word;
    std::vector<SenseDefinition> entries;
};

// Reads the seven-column TSV (usage_id, word, sense_id, gloss, example,
// period, date; empty field = absent). Validates the split: unique usage IDs,
// non-empty example text, known period tokens, no sense ID in the reserved
// "novel:" namespace, and referential integrity (every annotated usage has a
// gloss row for its word+sense). A sense definition materializes from every
// row carrying both sense_id and gloss; conflicting glosses for the same
// (word, sense_id, period) are an error.
DatasetSplit load_split(const std::string& path, Language language);

// Inverse of load_split, byte-stable: load(save(x)) == x and saving a freshly
// loaded file reproduces it byte for byte.
void save_split(const DatasetSplit& split, const std::string& path);

// Old-period sense inventory per word. Every word of the split appears as a
// key; words without old senses map to an empty inventory.
std::map<std::string, SenseInventory> old_inventories(const DatasetSplit& split);

// Usages restricted to one period (order preserved); senses are kept as-is.
DatasetSplit filter_period(const DatasetSplit& split, Period period);

// Gloss of (word, sense_id), preferring the old-period entry. Empty optional
// when no entry carries a gloss.
std::optional<std::string> gloss_for(const DatasetSplit& split, const std::string& word,
                                     const std::string& sense_id);

} // namespace sensebridge

#endif
