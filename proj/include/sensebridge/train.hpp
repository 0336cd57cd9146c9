#ifndef SENSEBRIDGE_TRAIN_HPP
#define SENSEBRIDGE_TRAIN_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sensebridge/corpus.hpp"
#include "sensebridge/pairgen.hpp"

namespace sensebridge {

struct TrainConfig {
    std::string model_identifier = "xlm-roberta-base";
    int epochs = 1;
    int batch_size = 32;
    int grad_accum_steps = 1;
    double learning_rate = 5e-4;
    bool half_precision = false;
    bool adapter = true;
    std::optional<std::string> warm_start_checkpoint;
    std::uint64_t seed = 42;

    bool operator==(const TrainConfig&) const = default;
};

// Per-language training defaults: fi = large encoder, 10 epochs, batch 128,
// 3 accumulation steps, half precision; ru = base encoder, 50 epochs, batch
// 144; de = 20 epochs, batch 48, 6 accumulation steps, half precision, meant
// to warm-start from the Finnish checkpoint. Learning rate 5e-4 throughout.
TrainConfig default_train_config(Language language);

struct Checkpoint {
    std::string path; // checkpoint directory
    double dev_f1 = 0.0;
    int epoch = 0; // 1-based epoch the weights come from; 0 for a no-op run
    TrainConfig config;
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double dev_f1 = 0.0;
};

struct TrainResult {
    Checkpoint checkpoint;
    std::vector<EpochStats> log;
};

// Trains the pair classifier with Adam on binary cross-entropy and keeps the
// epoch whose dev F1 (positive-class F1 at the 0.5 decision threshold) is
// highest; ties go to the earlier epoch. epochs == 0 is allowed only with a
// warm start and just re-evaluates the restored weights. The checkpoint
// directory receives config.json, weights.bin and training_log.tsv.
TrainResult train(const PairDataset& train_set, const PairDataset& dev_set,
                  const TrainConfig& config, const std::string& out_dir);

// Reads config.json of an existing checkpoint directory.
Checkpoint load_checkpoint_info(const std::string& dir);

// Positive-class F1 of binary predictions; UsageError on length mismatch.
double binary_f1(const std::vector<int>& gold, const std::vector<int>& predicted);

} // namespace sensebridge

#endif
