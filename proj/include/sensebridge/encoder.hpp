#ifndef SENSEBRIDGE_ENCODER_HPP
#define SENSEBRIDGE_ENCODER_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace sensebridge {

// Architecture of the pair classifier: a pre-LN transformer encoder over
// hashed tokens with mean pooling and a single-logit head. Bottleneck
// adapters (one after each sublayer) are allocated when adapter_dim > 0 and
// used when training runs in adapter mode.
struct EncoderSpec {
    std::size_t vocab_size = 8192;
    std::size_t dim = 64;
    std::size_t layers = 2;
    std::size_t heads = 4;
    std::size_t ffn_dim = 256;
    std::size_t max_len = 128;
    std::size_t adapter_dim = 16;

    bool operator==(const EncoderSpec&) const = default;
};

// Resolves a model identifier to an architecture. Known presets: tiny, small,
// base (alias xlm-roberta-base), large (alias xlm-roberta-large), plus
// "custom:vocab=..,dim=..,layers=..,heads=..,ffn=..,maxlen=..,adapter=..".
// Identifiers name shapes of this encoder; weights always start random or
// come from a warm-start checkpoint.
EncoderSpec spec_for_model(const std::string& model_identifier);

struct Param {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<float> w;  // master weights
    std::vector<float> cw; // binary16-rounded compute copy (half precision only)
    std::vector<float> g;  // accumulated gradient
    bool trainable = true;
    const float* active = nullptr; // points at w or cw

    std::size_t size() const { return rows * cols; }
};

class PairEncoder {
public:
    PairEncoder(const EncoderSpec& spec, std::uint64_t seed);

    const EncoderSpec& spec() const { return spec_; }

    // Select fp32 master weights or a binary16-rounded copy for compute.
    // Must be re-applied after every optimizer step in half-precision runs.
    void set_half_precision(bool half);
    bool half_precision() const { return half_; }

    // In adapter mode only adapter and head parameters are trainable; the
    // base encoder stays frozen. Full mode trains everything.
    void set_adapter_mode(bool adapter_only);

    double forward_logit(const std::vector<std::uint32_t>& ids) const;

    // Forward + backward for one sequence; accumulates gradients of the
    // binary cross-entropy loss into the params and returns the loss.
    double train_step(const std::vector<std::uint32_t>& ids, int label);

    // Final-layer contextual vector per position (used as an embedding
    // backend for similarity scoring).
    std::vector<std::vector<float>> hidden_states(const std::vector<std::uint32_t>& ids) const;

    std::vector<Param>& params() { return params_; }
    const std::vector<Param>& params() const { return params_; }
    Param& param(const std::string& name);

    void zero_grads();

    void save_weights(const std::string& path) const;
    void load_weights(const std::string& path);

private:
    struct Activations;
    double forward_impl(const std::vector<std::uint32_t>& ids, Activations* cache) const;
    void backward_impl(const std::vector<std::uint32_t>& ids, const Activations& cache,
                       float dlogit);
    Param& add_param(const std::string& name, std::size_t rows, std::size_t cols);

    EncoderSpec spec_;
    std::vector<Param> params_;
    bool half_ = false;
};

double logistic(double logit);

} // namespace sensebridge

#endif
