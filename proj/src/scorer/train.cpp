#include "sensebridge/train.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "sensebridge/encoder.hpp"
#include "sensebridge/error.hpp"
#include "sensebridge/kernels.hpp"
#include "sensebridge/rng.hpp"
#include "sensebridge/tokenizer.hpp"
#include "sensebridge/tsv.hpp"

namespace sensebridge {

namespace fs = std::filesystem;
using nlohmann::json;

TrainConfig default_train_config(Language language) {
    TrainConfig config;
    config.learning_rate = 5e-4;
    config.adapter = true;
    switch (language) {
        case Language::fi:
            config.model_identifier = "xlm-roberta-large";
            config.epochs = 10;
            config.batch_size = 128;
            config.grad_accum_steps = 3;
            config.half_precision = true;
            break;
        case Language::ru:
            config.model_identifier = "xlm-roberta-base";
            config.epochs = 50;
            config.batch_size = 144;
            config.grad_accum_steps = 1;
            config.half_precision = false;
            break;
        case Language::de:
            // continued training from the Finnish checkpoint
            config.model_identifier = "xlm-roberta-large";
            config.epochs = 20;
            config.batch_size = 48;
            config.grad_accum_steps = 6;
            config.half_precision = true;
            break;
    }
    return config;
}

double binary_f1(const std::vector<int>& gold, const std::vector<int>& predicted) {
    if (gold.size() != predicted.size()) {
        throw UsageError("binary_f1: length mismatch");
    }
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (predicted[i] == 1 && gold[i] == 1) ++tp;
        else if (predicted[i] == 1 && gold[i] == 0) ++fp;
        else if (predicted[i] == 0 && gold[i] == 1) ++fn;
    }
    if (tp == 0) return 0.0;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    return 2.0 * precision * recall / (precision + recall);
}

// --- checkpoint serialization ----------------------------------------------

namespace {

json config_to_json(const TrainConfig& config) {
    json j;
    j["model_identifier"] = config.model_identifier;
    j["epochs"] = config.epochs;
    j["batch_size"] = config.batch_size;
    j["grad_accum_steps"] = config.grad_accum_steps;
    j["learning_rate"] = config.learning_rate;
    j["half_precision"] = config.half_precision;
    j["adapter"] = config.adapter;
    if (config.warm_start_checkpoint) {
        j["warm_start_checkpoint"] = *config.warm_start_checkpoint;
    }
    j["seed"] = config.seed;
    return j;
}

TrainConfig config_from_json(const json& j) {
    TrainConfig config;
    config.model_identifier = j.at("model_identifier").get<std::string>();
    config.epochs = j.at("epochs").get<int>();
    config.batch_size = j.at("batch_size").get<int>();
    config.grad_accum_steps = j.at("grad_accum_steps").get<int>();
    config.learning_rate = j.at("learning_rate").get<double>();
    config.half_precision = j.at("half_precision").get<bool>();
    config.adapter = j.at("adapter").get<bool>();
    if (j.contains("warm_start_checkpoint")) {
        config.warm_start_checkpoint = j.at("warm_start_checkpoint").get<std::string>();
    }
    config.seed = j.at("seed").get<std::uint64_t>();
    return config;
}

json spec_to_json(const EncoderSpec& spec) {
    json j;
    j["vocab_size"] = spec.vocab_size;
    j["dim"] = spec.dim;
    j["layers"] = spec.layers;
    j["heads"] = spec.heads;
    j["ffn_dim"] = spec.ffn_dim;
    j["max_len"] = spec.max_len;
    j["adapter_dim"] = spec.adapter_dim;
    return j;
}

EncoderSpec spec_from_json(const json& j) {
    EncoderSpec spec;
    spec.vocab_size = j.at("vocab_size").get<std::size_t>();
    spec.dim = j.at("dim").get<std::size_t>();
    spec.layers = j.at("layers").get<std::size_t>();
    spec.heads = j.at("heads").get<std::size_t>();
    spec.ffn_dim = j.at("ffn_dim").get<std::size_t>();
    spec.max_len = j.at("max_len").get<std::size_t>();
    spec.adapter_dim = j.at("adapter_dim").get<std::size_t>();
    return spec;
}

void write_checkpoint_config(const std::string& dir, const TrainConfig& config,
                             const EncoderSpec& spec, int best_epoch, double dev_f1) {
    json j;
    j["config"] = config_to_json(config);
    j["encoder"] = spec_to_json(spec);
    j["optimizer"] = "adam"; // free hyperparameter, recorded for reproducibility
    j["best_epoch"] = best_epoch;
    j["dev_f1"] = dev_f1;
    std::ofstream out(dir + "/config.json", std::ios::trunc);
    if (!out) throw SerializationError("cannot write checkpoint config in '" + dir + "'");
    out << j.dump(2) << "\n";
}

} // namespace

EncoderSpec checkpoint_encoder_spec(const std::string& dir);

Checkpoint load_checkpoint_info(const std::string& dir) {
    std::ifstream in(dir + "/config.json");
    if (!in) throw ParseError("no checkpoint config in '" + dir + "'");
    json j = json::parse(in, nullptr, true);
    Checkpoint ckpt;
    ckpt.path = dir;
    ckpt.config = config_from_json(j.at("config"));
    ckpt.epoch = j.at("best_epoch").get<int>();
    ckpt.dev_f1 = j.at("dev_f1").get<double>();
    return ckpt;
}

EncoderSpec checkpoint_encoder_spec(const std::string& dir) {
    std::ifstream in(dir + "/config.json");
    if (!in) throw ParseError("no checkpoint config in '" + dir + "'");
    json j = json::parse(in, nullptr, true);
    return spec_from_json(j.at("encoder"));
}

// --- training ----------------------------------------------------------------

namespace {

struct Adam {
    double lr;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step_count = 0;
    std::vector<std::vector<float>> m, v;

    explicit Adam(const std::vector<Param>& params, double learning_rate) : lr(learning_rate) {
        m.resize(params.size());
        v.resize(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            m[i].assign(params[i].size(), 0.0f);
            v[i].assign(params[i].size(), 0.0f);
        }
    }

    void step(std::vector<Param>& params, double grad_scale) {
        ++step_count;
        const double bc1 = 1.0 - std::pow(beta1, step_count);
        const double bc2 = 1.0 - std::pow(beta2, step_count);
        for (std::size_t i = 0; i < params.size(); ++i) {
            Param& p = params[i];
            if (!p.trainable) continue;
            for (std::size_t j = 0; j < p.size(); ++j) {
                const double g = static_cast<double>(p.g[j]) * grad_scale;
                double mj = beta1 * m[i][j] + (1.0 - beta1) * g;
                double vj = beta2 * v[i][j] + (1.0 - beta2) * g * g;
                m[i][j] = static_cast<float>(mj);
                v[i][j] = static_cast<float>(vj);
                const double mhat = mj / bc1;
                const double vhat = vj / bc2;
                p.w[j] -= static_cast<float>(lr * mhat / (std::sqrt(vhat) + eps));
            }
        }
    }
};

std::vector<std::vector<std::uint32_t>> tokenize_pairs(const PairDataset& dataset,
                                                       const HashTokenizer& tokenizer,
                                                       std::size_t max_len) {
    std::vector<std::vector<std::uint32_t>> out;
    out.reserve(dataset.pairs.size());
    for (const auto& pair : dataset.pairs) {
        std::string text = pair.example_text + '\t' + pair.gloss;
        out.push_back(tokenizer.encode_pair_text(text, max_len));
    }
    return out;
}

double evaluate_dev_f1(PairEncoder& encoder,
                       const std::vector<std::vector<std::uint32_t>>& sequences,
                       const PairDataset& dev) {
    std::vector<int> gold, predicted;
    gold.reserve(dev.pairs.size());
    predicted.reserve(dev.pairs.size());
    for (std::size_t i = 0; i < dev.pairs.size(); ++i) {
        gold.push_back(dev.pairs[i].label);
        const double p = logistic(encoder.forward_logit(sequences[i]));
        predicted.push_back(p > 0.5 ? 1 : 0);
    }
    return binary_f1(gold, predicted);
}

void validate_inputs(const PairDataset& train_set, const PairDataset& dev_set,
                     const TrainConfig& config) {
    if (train_set.pairs.empty()) throw UsageError("training set is empty");
    if (dev_set.pairs.empty()) throw UsageError("dev set is empty");
    bool has_pos = false, has_neg = false;
    for (const auto& p : dev_set.pairs) (p.label ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) {
        throw UsageError("dev set must contain both labels; F1 checkpoint selection is "
                         "undefined otherwise");
    }
    if (config.learning_rate <= 0.0) throw UsageError("learning_rate must be positive");
    if (config.batch_size < 1) throw UsageError("batch_size must be at least 1");
    if (config.grad_accum_steps < 1) throw UsageError("grad_accum_steps must be at least 1");
    if (config.epochs < 0) throw UsageError("epochs must be non-negative");
    if (config.epochs == 0 && !config.warm_start_checkpoint) {
        throw UsageError("epochs == 0 only makes sense with a warm start");
    }
}

} // namespace

TrainResult train(const PairDataset& train_set, const PairDataset& dev_set,
                  const TrainConfig& config, const std::string& out_dir) {
    validate_inputs(train_set, dev_set, config);

    TrainConfig effective = config;
    EncoderSpec spec;
    if (config.warm_start_checkpoint) {
        spec = checkpoint_encoder_spec(*config.warm_start_checkpoint);
        // keep the architecture identifier of the restored model
        effective.model_identifier =
            load_checkpoint_info(*config.warm_start_checkpoint).config.model_identifier;
    } else {
        spec = spec_for_model(config.model_identifier);
    }

    PairEncoder encoder(spec, config.seed);
    if (config.warm_start_checkpoint) {
        encoder.load_weights(*config.warm_start_checkpoint + "/weights.bin");
    }
    encoder.set_adapter_mode(config.adapter);
    encoder.set_half_precision(config.half_precision);

    HashTokenizer tokenizer(spec.vocab_size);
    const auto train_tokens = tokenize_pairs(train_set, tokenizer, spec.max_len);
    const auto dev_tokens = tokenize_pairs(dev_set, tokenizer, spec.max_len);

    Adam adam(encoder.params(), config.learning_rate);

    std::vector<EpochStats> log;
    double best_f1 = -1.0;
    int best_epoch = 0;
    std::vector<std::vector<float>> best_weights;

    auto snapshot = [&encoder, &best_weights]() {
        best_weights.clear();
        for (const auto& p : encoder.params()) best_weights.push_back(p.w);
    };

    if (config.epochs == 0) {
        best_f1 = evaluate_dev_f1(encoder, dev_tokens, dev_set);
        best_epoch = 0;
        snapshot();
        log.push_back({0, 0.0, best_f1});
    }

    std::vector<std::size_t> order(train_set.pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    const std::size_t micro = static_cast<std::size_t>(config.batch_size);
    const std::size_t accum = static_cast<std::size_t>(config.grad_accum_steps);

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        Rng rng(config.seed + static_cast<std::uint64_t>(epoch) * 0x9e3779b9ULL);
        rng.shuffle(order);

        double loss_sum = 0.0;
        std::size_t accumulated = 0;  // sequences since the last optimizer step
        std::size_t micro_batches = 0;
        encoder.zero_grads();

        auto flush = [&]() {
            if (accumulated == 0) return;
            adam.step(encoder.params(), 1.0 / static_cast<double>(accumulated));
            encoder.zero_grads();
            if (config.half_precision) encoder.set_half_precision(true);
            accumulated = 0;
            micro_batches = 0;
        };

        for (std::size_t i = 0; i < order.size(); ++i) {
            const std::size_t idx = order[i];
            loss_sum += encoder.train_step(train_tokens[idx], train_set.pairs[idx].label);
            ++accumulated;
            if (accumulated % micro == 0 && accumulated / micro > micro_batches) {
                ++micro_batches;
                if (micro_batches == accum) flush();
            }
        }
        flush(); // trailing partial batch

        const double mean_loss = loss_sum / static_cast<double>(order.size());
        const double dev_f1 = evaluate_dev_f1(encoder, dev_tokens, dev_set);
        log.push_back({epoch, mean_loss, dev_f1});
        if (dev_f1 > best_f1) {
            best_f1 = dev_f1;
            best_epoch = epoch;
            snapshot();
        }
    }

    // restore the best epoch's weights before saving
    if (!best_weights.empty()) {
        auto& params = encoder.params();
        for (std::size_t i = 0; i < params.size(); ++i) params[i].w = best_weights[i];
        encoder.set_half_precision(config.half_precision);
    }

    fs::create_directories(out_dir);
    encoder.save_weights(out_dir + "/weights.bin");
    write_checkpoint_config(out_dir, effective, spec, best_epoch, best_f1);
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& stats : log) {
            rows.push_back({std::to_string(stats.epoch), tsv::format_double(stats.train_loss),
                            tsv::format_double(stats.dev_f1)});
        }
        tsv::write_file(out_dir + "/training_log.tsv", {"epoch", "train_loss", "dev_f1"}, rows);
    }

    TrainResult result;
    result.checkpoint = {out_dir, best_f1, best_epoch, effective};
    result.log = std::move(log);
    return result;
}

} // namespace sensebridge
