#include "sensebridge/corpus.hpp"

#include <set>
#include <unordered_map>
#include <unordered_set>

#include "sensebridge/error.hpp"
#include "sensebridge/records.hpp"
#include "sensebridge/tsv.hpp"

namespace sensebridge {

namespace {

constexpr const char* kNovelPrefix = "novel:";

const std::vector<std::string> kSplitHeader = {"usage_id", "word",   "sense_id", "gloss",
                                               "example",  "period", "date"};

bool starts_with_novel(const std::string& id) {
    return id.rfind(kNovelPrefix, 0) == 0;
}

std::string location(const std::string& path, std::size_t line) {
    return path + ":" + std::to_string(line);
}

} // namespace

Language parse_language(const std::string& code) {
    if (code == "fi") return Language::fi;
    if (code == "ru") return Language::ru;
    if (code == "de") return Language::de;
    throw ValidationError("unknown language code '" + code + "' (expected fi, ru or de)");
}

std::string to_string(Language language) {
    switch (language) {
        case Language::fi: return "fi";
        case Language::ru: return "ru";
        case Language::de: return "de";
    }
    return "?";
}

Period parse_period(const std::string& token) {
    if (token == "old") return Period::Old;
    if (token == "new") return Period::New;
    throw ValidationError("unknown period token '" + token + "' (expected 'old' or 'new')");
}

std::string to_string(Period period) {
    return period == Period::Old ? "old" : "new";
}

DatasetSplit load_split(const std::string& path, Language language) {
    tsv::Table table = tsv::read_file(path);
    if (table.header != kSplitHeader) {
        throw ParseError(path + ": unexpected header; expected usage_id, word, sense_id, gloss, "
                         "example, period, date");
    }

    DatasetSplit split;
    split.language = language;

    std::unordered_set<std::string> seen_usage_ids;
    // (word \t sense_id \t period) -> index into split.senses
    std::unordered_map<std::string, std::size_t> sense_index;
    // (word \t sense_id) -> has at least one gloss row, for referential checks
    std::unordered_set<std::string> glossed;

    for (const auto& row : table.rows) {
        const std::string& usage_id = row.fields[0];
        const std::string& word = row.fields[1];
        const std::string& sense_id = row.fields[2];
        const std::string& gloss = row.fields[3];
        const std::string& example = row.fields[4];
        const std::string& period_token = row.fields[5];
        const std::string& date = row.fields[6];

        if (usage_id.empty())
            throw ValidationError(location(path, row.line_number) + ": empty usage_id");
        if (word.empty())
            throw ValidationError(location(path, row.line_number) + ": empty word");
        if (example.empty())
            throw ValidationError(location(path, row.line_number) + ": empty example text");

        Period period;
        try {
            period = parse_period(period_token);
        } catch (const ValidationError& e) {
            throw ValidationError(location(path, row.line_number) + ": " + e.what());
        }

        if (!seen_usage_ids.insert(usage_id).second) {
            throw ValidationError(location(path, row.line_number) + ": duplicate usage_id '" +
                                  usage_id + "'");
        }
        if (starts_with_novel(sense_id)) {
            throw ValidationError(location(path, row.line_number) + ": sense_id '" + sense_id +
                                  "' uses the reserved 'novel:' namespace");
        }

        UsageExample usage;
        usage.usage_id = usage_id;
        usage.word = word;
        usage.example_text = example;
        if (!sense_id.empty()) usage.sense_id = sense_id;
        usage.period = period;
        if (!date.empty()) usage.date = date;
        split.usages.push_back(std::move(usage));

        if (!sense_id.empty() && !gloss.empty()) {
            std::string key = word + '\t' + sense_id + '\t' + period_token;
            auto it = sense_index.find(key);
            if (it == sense_index.end()) {
                sense_index.emplace(std::move(key), split.senses.size());
                split.senses.push_back({sense_id, word, gloss, period});
                glossed.insert(word + '\t' + sense_id);
            } else if (split.senses[it->second].gloss != gloss) {
                throw ValidationError(location(path, row.line_number) +
                                      ": conflicting glosses for sense '" + sense_id +
                                      "' of word '" + word + "'");
            }
        }
    }

    // Referential integrity: every annotated usage must resolve to a gloss row.
    for (const auto& row : table.rows) {
        const std::string& word = row.fields[1];
        const std::string& sense_id = row.fields[2];
        if (!sense_id.empty() && !glossed.count(word + '\t' + sense_id)) {
            throw ValidationError(location(path, row.line_number) + ": sense_id '" + sense_id +
                                  "' of word '" + word + "' has no gloss row");
        }
    }

    return split;
}

void save_split(const DatasetSplit& split, const std::string& path) {
    // One row per usage; the gloss column is filled from the usage's sense
    // entry matching its own period (the layout load_split materializes from).
    std::unordered_map<std::string, const SenseDefinition*> by_key;
    for (const auto& sense : split.senses) {
        by_key.emplace(sense.word + '\t' + sense.sense_id + '\t' + to_string(sense.period),
                       &sense);
    }
    std::vector<std::vector<std::string>> rows;
    rows.reserve(split.usages.size());
    for (const auto& usage : split.usages) {
        std::string gloss;
        if (usage.sense_id) {
            auto it = by_key.find(usage.word + '\t' + *usage.sense_id + '\t' +
                                  to_string(usage.period));
            if (it != by_key.end()) gloss = it->second->gloss;
        }
        rows.push_back({usage.usage_id, usage.word, usage.sense_id.value_or(""), gloss,
                        usage.example_text, to_string(usage.period), usage.date.value_or("")});
    }
    tsv::write_file(path, kSplitHeader, rows);
}

std::map<std::string, SenseInventory> old_inventories(const DatasetSplit& split) {
    std::map<std::string, SenseInventory> inventories;
    auto ensure = [&inventories](const std::string& word) -> SenseInventory& {
        auto [it, inserted] = inventories.try_emplace(word);
        if (inserted) it->second.word = word;
        return it->second;
    };
    for (const auto& usage : split.usages) ensure(usage.word);
    for (const auto& sense : split.senses) {
        SenseInventory& inv = ensure(sense.word);
        if (sense.period != Period::Old) continue;
        bool duplicate = false;
        for (const auto& entry : inv.entries) {
            if (entry.sense_id == sense.sense_id) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) inv.entries.push_back(sense);
    }
    return inventories;
}

DatasetSplit filter_period(const DatasetSplit& split, Period period) {
    DatasetSplit out;
    out.language = split.language;
    out.senses = split.senses;
    for (const auto& usage : split.usages) {
        if (usage.period == period) out.usages.push_back(usage);
    }
    return out;
}

std::optional<std::string> gloss_for(const DatasetSplit& split, const std::string& word,
                                     const std::string& sense_id) {
    const SenseDefinition* found = nullptr;
    for (const auto& sense : split.senses) {
        if (sense.word != word || sense.sense_id != sense_id) continue;
        if (sense.period == Period::Old) return sense.gloss;
        if (!found) found = &sense;
    }
    if (found) return found->gloss;
    return std::nullopt;
}

// --- prediction records ---------------------------------------------------

void save_predictions(const std::vector<PredictionRecord>& records, const std::string& path,
                      bool with_definitions) {
    std::vector<std::string> header = {"usage_id", "word", "sense_id", "novel", "probability"};
    if (with_definitions) header.push_back("definition");

    std::vector<std::vector<std::string>> rows;
    rows.reserve(records.size());
    for (const auto& rec : records) {
        if (rec.assigned_sense_id.empty()) {
            throw SerializationError("record '" + rec.usage_id + "' has no sense_id");
        }
        std::vector<std::string> row = {
            rec.usage_id, rec.word, rec.assigned_sense_id, rec.is_novel ? "1" : "0",
            rec.winning_probability ? tsv::format_double(*rec.winning_probability) : ""};
        if (with_definitions) row.push_back(rec.definition.value_or(""));
        rows.push_back(std::move(row));
    }
    tsv::write_file(path, header, rows);
}

std::vector<PredictionRecord> load_predictions(const std::string& path) {
    tsv::Table table = tsv::read_file(path);
    const std::size_t id_col = table.column("usage_id");
    const std::size_t word_col = table.column("word");
    const std::size_t sense_col = table.column("sense_id");
    const std::size_t novel_col = table.column("novel");
    const std::size_t prob_col = table.column("probability");
    const bool enriched = table.has_column("definition");
    const std::size_t def_col = enriched ? table.column("definition") : 0;

    std::vector<PredictionRecord> records;
    records.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        PredictionRecord rec;
        rec.usage_id = row.fields[id_col];
        rec.word = row.fields[word_col];
        rec.assigned_sense_id = row.fields[sense_col];
        const std::string& novel = row.fields[novel_col];
        if (novel != "0" && novel != "1") {
            throw ValidationError(location(path, row.line_number) + ": novel flag must be 0 or 1");
        }
        rec.is_novel = novel == "1";
        if (rec.assigned_sense_id.empty()) {
            throw ValidationError(location(path, row.line_number) + ": empty sense_id");
        }
        if (!row.fields[prob_col].empty()) {
            rec.winning_probability =
                tsv::parse_double(row.fields[prob_col], location(path, row.line_number));
        }
        if (enriched) {
            const std::string& definition = row.fields[def_col];
            if (!definition.empty()) {
                rec.definition = definition;
            } else if (rec.is_novel) {
                rec.definition = std::string();
                rec.no_candidates = true;
            }
        }
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace sensebridge
