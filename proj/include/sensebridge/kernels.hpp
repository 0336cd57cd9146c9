#ifndef SENSEBRIDGE_KERNELS_HPP
#define SENSEBRIDGE_KERNELS_HPP

#include <cstddef>
#include <cstdint>

namespace sensebridge::kernels {

enum class Isa { scalar, avx2 };

const char* to_string(Isa isa);

// Dispatch table for the float32 inner loops shared by the neural scorer and
// the embedding-similarity metric. All matmuls are row-major; with
// accumulate=false the output is overwritten, otherwise added to.
struct Ops {
    float (*dot)(const float* a, const float* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(float alpha, const float* x, float* y, std::size_t n);
    // x *= alpha
    void (*scale)(float* x, float alpha, std::size_t n);
    // C(m x n) = A(m x k) * B(n x k)^T
    void (*matmul_nt)(const float* a, const float* b, float* c, std::size_t m, std::size_t k,
                      std::size_t n, bool accumulate);
    // C(m x n) = A(m x k) * B(k x n)
    void (*matmul_nn)(const float* a, const float* b, float* c, std::size_t m, std::size_t k,
                      std::size_t n, bool accumulate);
    // C(m x n) = A(k x m)^T * B(k x n)
    void (*matmul_tn)(const float* a, const float* b, float* c, std::size_t m, std::size_t k,
                      std::size_t n, bool accumulate);
    // numerically stable in-place softmax over each row
    void (*softmax_rows)(float* x, std::size_t rows, std::size_t cols);
    // round every value through IEEE binary16 (round-to-nearest-even)
    void (*round_to_half)(float* x, std::size_t n);
};

// Table for one ISA; throws UsageError when the ISA is not compiled in or not
// supported by the running CPU.
const Ops& ops(Isa isa);

bool supported(Isa isa);

// Best ISA the CPU supports (among those compiled in).
Isa detect_best();

// Active table used by the scorer and metrics. Initialized on first use from
// detect_best(), overridable via SENSEBRIDGE_KERNELS=scalar|avx2 or select().
const Ops& active();
Isa active_isa();
void select(Isa isa);

// scalar reference for the binary16 round-trip, exposed for tests
std::uint16_t float_to_half(float value);
float half_to_float(std::uint16_t half);

} // namespace sensebridge::kernels

#endif
