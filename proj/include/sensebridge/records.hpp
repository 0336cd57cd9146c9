#ifndef SENSEBRIDGE_RECORDS_HPP
#define SENSEBRIDGE_RECORDS_HPP

#include <optional>
#include <string>
#include <vector>

namespace sensebridge {

// Per-usage output of subtask-1 inference, optionally enriched with a
// definition by subtask-2 matching.
struct PredictionRecord {
    std::string usage_id;
    std::string word;
    std::string assigned_sense_id;
    bool is_novel = false;
    std::optional<double> winning_probability; // absent for copy-through rows and empty inventories
    std::optional<std::string> definition;     // filled by glossmatch for novel records
    bool no_candidates = false;                // novel record whose word had no harvested definitions

    bool operator==(const PredictionRecord&) const = default;
};

// Submission TSV: usage_id, word, sense_id, novel, probability and, when
// with_definitions, a trailing definition column. Every record must carry a
// sense ID; SerializationError otherwise.
void save_predictions(const std::vector<PredictionRecord>& records, const std::string& path,
                      bool with_definitions = false);

// Accepts both the five-column and the enriched six-column layout. In the
// enriched layout an empty definition on a novel row means no candidate was
// available, so no_candidates is reconstructed from it.
std::vector<PredictionRecord> load_predictions(const std::string& path);

} // namespace sensebridge

#endif
