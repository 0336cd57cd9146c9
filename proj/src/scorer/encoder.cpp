#include "sensebridge/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "sensebridge/error.hpp"
#include "sensebridge/kernels.hpp"
#include "sensebridge/rng.hpp"

namespace sensebridge {

namespace {

constexpr float kLnEps = 1e-5f;
constexpr double kGeluC = 0.7978845608028654; // sqrt(2/pi)

std::size_t parse_size(const std::string& value, const std::string& key) {
    try {
        return static_cast<std::size_t>(std::stoull(value));
    } catch (...) {
        throw UsageError("bad value for '" + key + "' in model identifier: '" + value + "'");
    }
}

float gelu(float x) {
    double xd = x;
    return static_cast<float>(0.5 * xd * (1.0 + std::tanh(kGeluC * (xd + 0.044715 * xd * xd * xd))));
}

float gelu_grad(float x) {
    double xd = x;
    double u = kGeluC * (xd + 0.044715 * xd * xd * xd);
    double t = std::tanh(u);
    double du = kGeluC * (1.0 + 3.0 * 0.044715 * xd * xd);
    return static_cast<float>(0.5 * (1.0 + t) + 0.5 * xd * (1.0 - t * t) * du);
}

} // namespace

double logistic(double logit) {
    if (logit >= 0.0) {
        return 1.0 / (1.0 + std::exp(-logit));
    }
    double e = std::exp(logit);
    return e / (1.0 + e);
}

EncoderSpec spec_for_model(const std::string& model_identifier) {
    if (model_identifier == "tiny") {
        return {.vocab_size = 2048, .dim = 32, .layers = 1, .heads = 2, .ffn_dim = 64,
                .max_len = 64, .adapter_dim = 8};
    }
    if (model_identifier == "small") {
        return {.vocab_size = 8192, .dim = 64, .layers = 2, .heads = 4, .ffn_dim = 256,
                .max_len = 128, .adapter_dim = 16};
    }
    if (model_identifier == "base" || model_identifier == "xlm-roberta-base") {
        return {.vocab_size = 32768, .dim = 192, .layers = 4, .heads = 6, .ffn_dim = 768,
                .max_len = 256, .adapter_dim = 32};
    }
    if (model_identifier == "large" || model_identifier == "xlm-roberta-large") {
        return {.vocab_size = 65536, .dim = 320, .layers = 6, .heads = 8, .ffn_dim = 1280,
                .max_len = 256, .adapter_dim = 48};
    }
    if (model_identifier.rfind("custom:", 0) == 0) {
        EncoderSpec spec;
        std::string body = model_identifier.substr(7);
        std::size_t pos = 0;
        while (pos < body.size()) {
            std::size_t comma = body.find(',', pos);
            std::string item =
                comma == std::string::npos ? body.substr(pos) : body.substr(pos, comma - pos);
            pos = comma == std::string::npos ? body.size() : comma + 1;
            std::size_t eq = item.find('=');
            if (eq == std::string::npos) {
                throw UsageError("expected key=value in model identifier, got '" + item + "'");
            }
            std::string key = item.substr(0, eq);
            std::string value = item.substr(eq + 1);
            if (key == "vocab") spec.vocab_size = parse_size(value, key);
            else if (key == "dim") spec.dim = parse_size(value, key);
            else if (key == "layers") spec.layers = parse_size(value, key);
            else if (key == "heads") spec.heads = parse_size(value, key);
            else if (key == "ffn") spec.ffn_dim = parse_size(value, key);
            else if (key == "maxlen") spec.max_len = parse_size(value, key);
            else if (key == "adapter") spec.adapter_dim = parse_size(value, key);
            else throw UsageError("unknown model identifier key '" + key + "'");
        }
        return spec;
    }
    throw UsageError("unknown model identifier '" + model_identifier +
                     "' (expected tiny, small, base, large, xlm-roberta-base, "
                     "xlm-roberta-large or custom:...)");
}

// --- parameter management ---------------------------------------------------

Param& PairEncoder::add_param(const std::string& name, std::size_t rows, std::size_t cols) {
    Param p;
    p.name = name;
    p.rows = rows;
    p.cols = cols;
    p.w.assign(rows * cols, 0.0f);
    p.g.assign(rows * cols, 0.0f);
    params_.push_back(std::move(p));
    return params_.back();
}

Param& PairEncoder::param(const std::string& name) {
    for (auto& p : params_) {
        if (p.name == name) return p;
    }
    throw UsageError("no parameter named '" + name + "'");
}

PairEncoder::PairEncoder(const EncoderSpec& spec, std::uint64_t seed) : spec_(spec) {
    if (spec.dim == 0 || spec.heads == 0 || spec.dim % spec.heads != 0) {
        throw UsageError("encoder dim must be a positive multiple of heads");
    }
    if (spec.vocab_size < 2 || spec.max_len < 3 || spec.layers == 0 || spec.ffn_dim == 0) {
        throw UsageError("invalid encoder spec");
    }

    Rng rng(seed);
    auto normal_init = [&rng](Param& p, double stddev) {
        for (auto& v : p.w) v = static_cast<float>(rng.gaussian() * stddev);
    };
    auto glorot_init = [&rng](Param& p, std::size_t fan_in, std::size_t fan_out) {
        double r = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (auto& v : p.w) v = static_cast<float>(rng.uniform(-r, r));
    };
    auto ones = [](Param& p) { std::fill(p.w.begin(), p.w.end(), 1.0f); };

    normal_init(add_param("tok_emb", spec.vocab_size, spec.dim), 0.02);
    normal_init(add_param("pos_emb", spec.max_len, spec.dim), 0.02);

    for (std::size_t l = 0; l < spec.layers; ++l) {
        const std::string prefix = "layer" + std::to_string(l) + ".";
        ones(add_param(prefix + "ln1_g", spec.dim, 1));
        add_param(prefix + "ln1_b", spec.dim, 1);
        glorot_init(add_param(prefix + "wq", spec.dim, spec.dim), spec.dim, spec.dim);
        add_param(prefix + "bq", spec.dim, 1);
        glorot_init(add_param(prefix + "wk", spec.dim, spec.dim), spec.dim, spec.dim);
        add_param(prefix + "bk", spec.dim, 1);
        glorot_init(add_param(prefix + "wv", spec.dim, spec.dim), spec.dim, spec.dim);
        add_param(prefix + "bv", spec.dim, 1);
        glorot_init(add_param(prefix + "wo", spec.dim, spec.dim), spec.dim, spec.dim);
        add_param(prefix + "bo", spec.dim, 1);
        ones(add_param(prefix + "ln2_g", spec.dim, 1));
        add_param(prefix + "ln2_b", spec.dim, 1);
        glorot_init(add_param(prefix + "w1", spec.ffn_dim, spec.dim), spec.dim, spec.ffn_dim);
        add_param(prefix + "b1", spec.ffn_dim, 1);
        glorot_init(add_param(prefix + "w2", spec.dim, spec.ffn_dim), spec.ffn_dim, spec.dim);
        add_param(prefix + "b2", spec.dim, 1);
        if (spec.adapter_dim > 0) {
            for (const char* which : {"ad1", "ad2"}) {
                std::string ap = prefix + which;
                glorot_init(add_param(ap + ".down_w", spec.adapter_dim, spec.dim), spec.dim,
                            spec.adapter_dim);
                add_param(ap + ".down_b", spec.adapter_dim, 1);
                // up projection starts at zero so a fresh adapter is the identity
                add_param(ap + ".up_w", spec.dim, spec.adapter_dim);
                add_param(ap + ".up_b", spec.dim, 1);
            }
        }
    }
    ones(add_param("ln_f_g", spec.dim, 1));
    add_param("ln_f_b", spec.dim, 1);
    glorot_init(add_param("head_w", 1, spec.dim), spec.dim, 1);
    add_param("head_b", 1, 1);

    set_half_precision(false);
}

void PairEncoder::set_half_precision(bool half) {
    half_ = half;
    for (auto& p : params_) {
        if (half) {
            p.cw = p.w;
            kernels::active().round_to_half(p.cw.data(), p.cw.size());
            p.active = p.cw.data();
        } else {
            p.cw.clear();
            p.active = p.w.data();
        }
    }
}

void PairEncoder::set_adapter_mode(bool adapter_only) {
    if (adapter_only && spec_.adapter_dim == 0) {
        throw UsageError("adapter mode requires adapter_dim > 0 in the encoder spec");
    }
    for (auto& p : params_) {
        const bool is_adapter = p.name.find(".ad1.") != std::string::npos ||
                                p.name.find(".ad2.") != std::string::npos;
        const bool is_head = p.name == "head_w" || p.name == "head_b";
        p.trainable = !adapter_only || is_adapter || is_head;
    }
}

void PairEncoder::zero_grads() {
    for (auto& p : params_) std::fill(p.g.begin(), p.g.end(), 0.0f);
}

// --- forward / backward -----------------------------------------------------

namespace {

// Row-major float matrix backed by a plain vector.
struct Mat {
    std::size_t rows = 0, cols = 0;
    std::vector<float> v;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0f) {}
    float* row(std::size_t r) { return v.data() + r * cols; }
    const float* row(std::size_t r) const { return v.data() + r * cols; }
    float* data() { return v.data(); }
    const float* data() const { return v.data(); }
};

// y = x * W^T + b, with W stored out x in.
void linear_forward(const Mat& x, const Param& w, const Param& b, Mat& y) {
    y = Mat(x.rows, w.rows);
    kernels::active().matmul_nt(x.data(), w.active, y.data(), x.rows, x.cols, w.rows, false);
    for (std::size_t r = 0; r < y.rows; ++r) {
        kernels::active().axpy(1.0f, b.active, y.row(r), y.cols);
    }
}

// Accumulates dW, db and returns dx.
void linear_backward(const Mat& dy, const Mat& x, Param& w, Param& b, Mat& dx) {
    dx = Mat(x.rows, x.cols);
    kernels::active().matmul_nn(dy.data(), w.active, dx.data(), dy.rows, dy.cols, x.cols, false);
    kernels::active().matmul_tn(dy.data(), x.data(), w.g.data(), w.rows, dy.rows, w.cols, true);
    for (std::size_t r = 0; r < dy.rows; ++r) {
        kernels::active().axpy(1.0f, dy.row(r), b.g.data(), dy.cols);
    }
}

struct LnCache {
    Mat xhat;                // normalized input
    std::vector<float> rstd; // per row
};

void layernorm_forward(const Mat& x, const Param& gamma, const Param& beta, Mat& y,
                       LnCache& cache) {
    const std::size_t d = x.cols;
    y = Mat(x.rows, d);
    cache.xhat = Mat(x.rows, d);
    cache.rstd.assign(x.rows, 0.0f);
    for (std::size_t r = 0; r < x.rows; ++r) {
        const float* in = x.row(r);
        float mean = 0.0f;
        for (std::size_t j = 0; j < d; ++j) mean += in[j];
        mean /= static_cast<float>(d);
        float var = 0.0f;
        for (std::size_t j = 0; j < d; ++j) {
            float c = in[j] - mean;
            var += c * c;
        }
        var /= static_cast<float>(d);
        float rstd = 1.0f / std::sqrt(var + kLnEps);
        cache.rstd[r] = rstd;
        float* xh = cache.xhat.row(r);
        float* out = y.row(r);
        for (std::size_t j = 0; j < d; ++j) {
            xh[j] = (in[j] - mean) * rstd;
            out[j] = gamma.active[j] * xh[j] + beta.active[j];
        }
    }
}

void layernorm_backward(const Mat& dy, const LnCache& cache, Param& gamma, Param& beta,
                        Mat& dx) {
    const std::size_t d = dy.cols;
    dx = Mat(dy.rows, d);
    for (std::size_t r = 0; r < dy.rows; ++r) {
        const float* dout = dy.row(r);
        const float* xh = cache.xhat.row(r);
        float mean_dxhat = 0.0f;
        float mean_dxhat_xhat = 0.0f;
        for (std::size_t j = 0; j < d; ++j) {
            float dxhat = dout[j] * gamma.active[j];
            gamma.g[j] += dout[j] * xh[j];
            beta.g[j] += dout[j];
            mean_dxhat += dxhat;
            mean_dxhat_xhat += dxhat * xh[j];
        }
        mean_dxhat /= static_cast<float>(d);
        mean_dxhat_xhat /= static_cast<float>(d);
        float* out = dx.row(r);
        for (std::size_t j = 0; j < d; ++j) {
            float dxhat = dout[j] * gamma.active[j];
            out[j] = cache.rstd[r] * (dxhat - mean_dxhat - xh[j] * mean_dxhat_xhat);
        }
    }
}

// Copies head slice [T x dh] out of a [T x d] matrix (and back).
void slice_head(const Mat& src, std::size_t head, std::size_t dh, Mat& dst) {
    dst = Mat(src.rows, dh);
    for (std::size_t r = 0; r < src.rows; ++r) {
        std::memcpy(dst.row(r), src.row(r) + head * dh, dh * sizeof(float));
    }
}

void unslice_head(const Mat& src, std::size_t head, std::size_t dh, Mat& dst) {
    for (std::size_t r = 0; r < src.rows; ++r) {
        std::memcpy(dst.row(r) + head * dh, src.row(r), dh * sizeof(float));
    }
}

struct AdapterCache {
    Mat input;  // sublayer output fed to the adapter
    Mat pre;    // down projection before relu
    Mat post;   // after relu
};

} // namespace

struct PairEncoder::Activations {
    struct Layer {
        Mat x_in;   // block input
        LnCache ln1;
        Mat h1;     // post-LN1
        Mat q, k, v;
        std::vector<Mat> attn; // softmax matrix per head
        Mat attn_concat;       // concatenated head outputs
        Mat attn_out;          // after output projection (pre adapter)
        AdapterCache ad1;
        Mat x_mid;  // after attention residual
        LnCache ln2;
        Mat h2;     // post-LN2
        Mat f1;     // pre-gelu
        Mat g;      // post-gelu
        Mat f2;     // FFN output (pre adapter)
        AdapterCache ad2;
    };
    Mat x0;
    std::vector<Layer> layers;
    LnCache ln_f;
    Mat y;
    std::vector<float> pooled;
    double logit = 0.0;
};

namespace {

void adapter_forward(const Mat& h, const Param& down_w, const Param& down_b, const Param& up_w,
                     const Param& up_b, Mat& out, AdapterCache& cache) {
    cache.input = h;
    linear_forward(h, down_w, down_b, cache.pre);
    cache.post = cache.pre;
    for (auto& v : cache.post.v) v = std::max(v, 0.0f);
    Mat up;
    linear_forward(cache.post, up_w, up_b, up);
    out = h;
    kernels::active().axpy(1.0f, up.data(), out.data(), out.v.size());
}

void adapter_backward(const Mat& dout, const AdapterCache& cache, Param& down_w, Param& down_b,
                      Param& up_w, Param& up_b, Mat& dh) {
    Mat dpost;
    linear_backward(dout, cache.post, up_w, up_b, dpost);
    for (std::size_t i = 0; i < dpost.v.size(); ++i) {
        if (cache.pre.v[i] <= 0.0f) dpost.v[i] = 0.0f;
    }
    linear_backward(dpost, cache.input, down_w, down_b, dh);
    kernels::active().axpy(1.0f, dout.data(), dh.data(), dh.v.size()); // skip connection
}

} // namespace

double PairEncoder::forward_impl(const std::vector<std::uint32_t>& ids,
                                 Activations* cache) const {
    if (ids.empty()) throw UsageError("cannot encode an empty token sequence");
    const std::size_t t = std::min(ids.size(), spec_.max_len);
    const std::size_t d = spec_.dim;
    const std::size_t heads = spec_.heads;
    const std::size_t dh = d / heads;
    const auto& ops = kernels::active();
    auto* self = const_cast<PairEncoder*>(this); // params are read-only here

    const Param& tok_emb = self->param("tok_emb");
    const Param& pos_emb = self->param("pos_emb");

    Activations local;
    Activations& acts = cache ? *cache : local;
    acts.layers.resize(spec_.layers);

    Mat x(t, d);
    for (std::size_t r = 0; r < t; ++r) {
        const std::uint32_t id = ids[r];
        if (id >= spec_.vocab_size) throw UsageError("token id out of range");
        const float* te = tok_emb.active + static_cast<std::size_t>(id) * d;
        const float* pe = pos_emb.active + r * d;
        float* out = x.row(r);
        for (std::size_t j = 0; j < d; ++j) out[j] = te[j] + pe[j];
    }
    acts.x0 = x;

    const float inv_sqrt_dh = 1.0f / std::sqrt(static_cast<float>(dh));

    for (std::size_t l = 0; l < spec_.layers; ++l) {
        const std::string prefix = "layer" + std::to_string(l) + ".";
        auto& layer = acts.layers[l];
        layer.x_in = x;

        layernorm_forward(x, self->param(prefix + "ln1_g"), self->param(prefix + "ln1_b"),
                          layer.h1, layer.ln1);
        linear_forward(layer.h1, self->param(prefix + "wq"), self->param(prefix + "bq"), layer.q);
        linear_forward(layer.h1, self->param(prefix + "wk"), self->param(prefix + "bk"), layer.k);
        linear_forward(layer.h1, self->param(prefix + "wv"), self->param(prefix + "bv"), layer.v);

        layer.attn.resize(heads);
        layer.attn_concat = Mat(t, d);
        for (std::size_t h = 0; h < heads; ++h) {
            Mat qh, kh, vh;
            slice_head(layer.q, h, dh, qh);
            slice_head(layer.k, h, dh, kh);
            slice_head(layer.v, h, dh, vh);
            Mat scores(t, t);
            ops.matmul_nt(qh.data(), kh.data(), scores.data(), t, dh, t, false);
            ops.scale(scores.data(), inv_sqrt_dh, t * t);
            ops.softmax_rows(scores.data(), t, t);
            layer.attn[h] = scores;
            Mat oh(t, dh);
            ops.matmul_nn(scores.data(), vh.data(), oh.data(), t, t, dh, false);
            unslice_head(oh, h, dh, layer.attn_concat);
        }
        linear_forward(layer.attn_concat, self->param(prefix + "wo"), self->param(prefix + "bo"),
                       layer.attn_out);

        Mat attn_total;
        if (spec_.adapter_dim > 0) {
            adapter_forward(layer.attn_out, self->param(prefix + "ad1.down_w"),
                            self->param(prefix + "ad1.down_b"), self->param(prefix + "ad1.up_w"),
                            self->param(prefix + "ad1.up_b"), attn_total, layer.ad1);
        } else {
            attn_total = layer.attn_out;
        }
        ops.axpy(1.0f, attn_total.data(), x.data(), x.v.size());
        layer.x_mid = x;

        layernorm_forward(x, self->param(prefix + "ln2_g"), self->param(prefix + "ln2_b"),
                          layer.h2, layer.ln2);
        linear_forward(layer.h2, self->param(prefix + "w1"), self->param(prefix + "b1"),
                       layer.f1);
        layer.g = layer.f1;
        for (auto& v : layer.g.v) v = gelu(v);
        linear_forward(layer.g, self->param(prefix + "w2"), self->param(prefix + "b2"), layer.f2);

        Mat ffn_total;
        if (spec_.adapter_dim > 0) {
            adapter_forward(layer.f2, self->param(prefix + "ad2.down_w"),
                            self->param(prefix + "ad2.down_b"), self->param(prefix + "ad2.up_w"),
                            self->param(prefix + "ad2.up_b"), ffn_total, layer.ad2);
        } else {
            ffn_total = layer.f2;
        }
        ops.axpy(1.0f, ffn_total.data(), x.data(), x.v.size());
    }

    layernorm_forward(x, self->param("ln_f_g"), self->param("ln_f_b"), acts.y, acts.ln_f);

    acts.pooled.assign(d, 0.0f);
    for (std::size_t r = 0; r < t; ++r) {
        ops.axpy(1.0f, acts.y.row(r), acts.pooled.data(), d);
    }
    ops.scale(acts.pooled.data(), 1.0f / static_cast<float>(t), d);

    const Param& head_w = self->param("head_w");
    const Param& head_b = self->param("head_b");
    acts.logit = static_cast<double>(ops.dot(head_w.active, acts.pooled.data(), d)) +
                 static_cast<double>(head_b.active[0]);
    return acts.logit;
}

void PairEncoder::backward_impl(const std::vector<std::uint32_t>& ids, const Activations& acts,
                                float dlogit) {
    const std::size_t t = acts.y.rows;
    const std::size_t d = spec_.dim;
    const std::size_t heads = spec_.heads;
    const std::size_t dh = d / heads;
    const auto& ops = kernels::active();

    Param& head_w = param("head_w");
    Param& head_b = param("head_b");
    ops.axpy(dlogit, acts.pooled.data(), head_w.g.data(), d);
    head_b.g[0] += dlogit;

    Mat dy(t, d);
    const float per_row = dlogit / static_cast<float>(t);
    for (std::size_t r = 0; r < t; ++r) {
        ops.axpy(per_row, head_w.active, dy.row(r), d);
    }

    Mat dx;
    layernorm_backward(dy, acts.ln_f, param("ln_f_g"), param("ln_f_b"), dx);

    const float inv_sqrt_dh = 1.0f / std::sqrt(static_cast<float>(dh));

    for (std::size_t l = spec_.layers; l-- > 0;) {
        const std::string prefix = "layer" + std::to_string(l) + ".";
        const auto& layer = acts.layers[l];

        // FFN block backward: x = x_mid + adapter(f2)
        Mat df2;
        if (spec_.adapter_dim > 0) {
            adapter_backward(dx, layer.ad2, param(prefix + "ad2.down_w"),
                             param(prefix + "ad2.down_b"), param(prefix + "ad2.up_w"),
                             param(prefix + "ad2.up_b"), df2);
        } else {
            df2 = dx;
        }
        Mat dg;
        linear_backward(df2, layer.g, param(prefix + "w2"), param(prefix + "b2"), dg);
        for (std::size_t i = 0; i < dg.v.size(); ++i) {
            dg.v[i] *= gelu_grad(layer.f1.v[i]);
        }
        Mat dh2;
        linear_backward(dg, layer.h2, param(prefix + "w1"), param(prefix + "b1"), dh2);
        Mat dx_mid;
        layernorm_backward(dh2, layer.ln2, param(prefix + "ln2_g"), param(prefix + "ln2_b"),
                           dx_mid);
        ops.axpy(1.0f, dx.data(), dx_mid.data(), dx_mid.v.size()); // residual path

        // attention block backward: x_mid = x_in + adapter(attn_out)
        Mat dattn_out;
        if (spec_.adapter_dim > 0) {
            adapter_backward(dx_mid, layer.ad1, param(prefix + "ad1.down_w"),
                             param(prefix + "ad1.down_b"), param(prefix + "ad1.up_w"),
                             param(prefix + "ad1.up_b"), dattn_out);
        } else {
            dattn_out = dx_mid;
        }
        Mat dconcat;
        linear_backward(dattn_out, layer.attn_concat, param(prefix + "wo"), param(prefix + "bo"),
                        dconcat);

        Mat dq(t, d), dk(t, d), dv(t, d);
        for (std::size_t h = 0; h < heads; ++h) {
            Mat qh, kh, vh, doh;
            slice_head(layer.q, h, dh, qh);
            slice_head(layer.k, h, dh, kh);
            slice_head(layer.v, h, dh, vh);
            slice_head(dconcat, h, dh, doh);
            const Mat& probs = layer.attn[h];

            Mat dprobs(t, t);
            ops.matmul_nt(doh.data(), vh.data(), dprobs.data(), t, dh, t, false);
            Mat dvh(t, dh);
            ops.matmul_tn(probs.data(), doh.data(), dvh.data(), t, t, dh, false);

            // softmax backward rows: ds = p * (dp - sum(dp*p))
            Mat dscores(t, t);
            for (std::size_t r = 0; r < t; ++r) {
                const float* p = probs.row(r);
                const float* dp = dprobs.row(r);
                float inner = ops.dot(dp, p, t);
                float* out = dscores.row(r);
                for (std::size_t j = 0; j < t; ++j) {
                    out[j] = p[j] * (dp[j] - inner);
                }
            }
            ops.scale(dscores.data(), inv_sqrt_dh, t * t);

            Mat dqh(t, dh);
            ops.matmul_nn(dscores.data(), kh.data(), dqh.data(), t, t, dh, false);
            Mat dkh(t, dh);
            ops.matmul_tn(dscores.data(), qh.data(), dkh.data(), t, t, dh, false);

            unslice_head(dqh, h, dh, dq);
            unslice_head(dkh, h, dh, dk);
            unslice_head(dvh, h, dh, dv);
        }

        Mat dh1, tmp;
        linear_backward(dq, layer.h1, param(prefix + "wq"), param(prefix + "bq"), dh1);
        linear_backward(dk, layer.h1, param(prefix + "wk"), param(prefix + "bk"), tmp);
        ops.axpy(1.0f, tmp.data(), dh1.data(), dh1.v.size());
        linear_backward(dv, layer.h1, param(prefix + "wv"), param(prefix + "bv"), tmp);
        ops.axpy(1.0f, tmp.data(), dh1.data(), dh1.v.size());

        Mat dx_in;
        layernorm_backward(dh1, layer.ln1, param(prefix + "ln1_g"), param(prefix + "ln1_b"),
                           dx_in);
        ops.axpy(1.0f, dx_mid.data(), dx_in.data(), dx_in.v.size()); // residual path
        dx = std::move(dx_in);
    }

    Param& tok_emb = param("tok_emb");
    Param& pos_emb = param("pos_emb");
    for (std::size_t r = 0; r < t; ++r) {
        const std::uint32_t id = ids[r];
        ops.axpy(1.0f, dx.row(r), tok_emb.g.data() + static_cast<std::size_t>(id) * d, d);
        ops.axpy(1.0f, dx.row(r), pos_emb.g.data() + r * d, d);
    }
}

double PairEncoder::forward_logit(const std::vector<std::uint32_t>& ids) const {
    return forward_impl(ids, nullptr);
}

double PairEncoder::train_step(const std::vector<std::uint32_t>& ids, int label) {
    Activations acts;
    const double z = forward_impl(ids, &acts);
    const double y = label ? 1.0 : 0.0;
    // numerically stable BCE with logits
    const double loss = std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
    const double dz = logistic(z) - y;
    backward_impl(ids, acts, static_cast<float>(dz));
    return loss;
}

std::vector<std::vector<float>> PairEncoder::hidden_states(
    const std::vector<std::uint32_t>& ids) const {
    Activations acts;
    forward_impl(ids, &acts);
    std::vector<std::vector<float>> out;
    out.reserve(acts.y.rows);
    for (std::size_t r = 0; r < acts.y.rows; ++r) {
        out.emplace_back(acts.y.row(r), acts.y.row(r) + acts.y.cols);
    }
    return out;
}

// --- weight serialization ---------------------------------------------------

namespace {
constexpr char kWeightsMagic[4] = {'S', 'B', 'W', '1'};
}

void PairEncoder::save_weights(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SerializationError("cannot open '" + path + "' for writing");
    out.write(kWeightsMagic, 4);
    const std::uint32_t count = static_cast<std::uint32_t>(params_.size());
    out.write(reinterpret_cast<const char*>(&count), sizeof(count));
    for (const auto& p : params_) {
        const std::uint32_t name_len = static_cast<std::uint32_t>(p.name.size());
        out.write(reinterpret_cast<const char*>(&name_len), sizeof(name_len));
        out.write(p.name.data(), name_len);
        const std::uint64_t rows = p.rows, cols = p.cols;
        out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
        out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
        out.write(reinterpret_cast<const char*>(p.w.data()),
                  static_cast<std::streamsize>(p.w.size() * sizeof(float)));
    }
    if (!out) throw SerializationError("write failed for '" + path + "'");
}

void PairEncoder::load_weights(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open weights file '" + path + "'");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kWeightsMagic, 4) != 0) {
        throw ParseError("'" + path + "' is not a weights file");
    }
    std::uint32_t count = 0;
    in.read(reinterpret_cast<char*>(&count), sizeof(count));
    std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> seen;
    for (std::uint32_t i = 0; i < count; ++i) {
        std::uint32_t name_len = 0;
        in.read(reinterpret_cast<char*>(&name_len), sizeof(name_len));
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        std::uint64_t rows = 0, cols = 0;
        in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
        in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
        if (!in) throw ParseError("truncated weights file '" + path + "'");
        Param& p = param(name);
        if (p.rows != rows || p.cols != cols) {
            throw ValidationError("shape mismatch for '" + name + "' in '" + path + "'");
        }
        in.read(reinterpret_cast<char*>(p.w.data()),
                static_cast<std::streamsize>(p.w.size() * sizeof(float)));
        if (!in) throw ParseError("truncated weights file '" + path + "'");
        seen.emplace(name, std::make_pair(rows, cols));
    }
    if (seen.size() != params_.size()) {
        throw ValidationError("weights file '" + path + "' does not cover all parameters");
    }
    set_half_precision(half_);
}

} // namespace sensebridge
