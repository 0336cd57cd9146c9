// AVX2/FMA/F16C variants of the float32 kernels. Compiled with -mavx2 -mfma
// -mf16c in its own translation unit; only entered after the runtime CPU
// check in kernels.cpp.
#if defined(__x86_64__) || defined(_M_X64)

#include <algorithm>
#include <cmath>
#include <immintrin.h>

#include "sensebridge/kernels.hpp"

namespace sensebridge::kernels {
namespace avx2 {

namespace {

inline float hsum(__m256 v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    __m128 s = _mm_add_ps(lo, hi);
    s = _mm_hadd_ps(s, s);
    s = _mm_hadd_ps(s, s);
    return _mm_cvtss_f32(s);
}

inline float hmax(__m256 v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    __m128 m = _mm_max_ps(lo, hi);
    m = _mm_max_ps(m, _mm_movehl_ps(m, m));
    m = _mm_max_ss(m, _mm_shuffle_ps(m, m, 0x1));
    return _mm_cvtss_f32(m);
}

} // namespace

float dot(const float* a, const float* b, std::size_t n) {
    __m256 acc = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc);
    }
    float result = hsum(acc);
    for (; i < n; ++i) result += a[i] * b[i];
    return result;
}

void axpy(float alpha, const float* x, float* y, std::size_t n) {
    const __m256 va = _mm256_set1_ps(alpha);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 vy = _mm256_loadu_ps(y + i);
        vy = _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), vy);
        _mm256_storeu_ps(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(float* x, float alpha, std::size_t n) {
    const __m256 va = _mm256_set1_ps(alpha);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_ps(x + i, _mm256_mul_ps(_mm256_loadu_ps(x + i), va));
    }
    for (; i < n; ++i) x[i] *= alpha;
}

void matmul_nt(const float* a, const float* b, float* c, std::size_t m, std::size_t k,
               std::size_t n, bool accumulate) {
    for (std::size_t i = 0; i < m; ++i) {
        const float* arow = a + i * k;
        for (std::size_t j = 0; j < n; ++j) {
            float acc = dot(arow, b + j * k, k);
            float* out = c + i * n + j;
            *out = accumulate ? *out + acc : acc;
        }
    }
}

void matmul_nn(const float* a, const float* b, float* c, std::size_t m, std::size_t k,
               std::size_t n, bool accumulate) {
    for (std::size_t i = 0; i < m; ++i) {
        float* row = c + i * n;
        if (!accumulate) std::fill(row, row + n, 0.0f);
        for (std::size_t p = 0; p < k; ++p) {
            axpy(a[i * k + p], b + p * n, row, n);
        }
    }
}

void matmul_tn(const float* a, const float* b, float* c, std::size_t m, std::size_t k,
               std::size_t n, bool accumulate) {
    if (!accumulate) std::fill(c, c + m * n, 0.0f);
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t i = 0; i < m; ++i) {
            axpy(a[p * m + i], b + p * n, c + i * n, n);
        }
    }
}

void softmax_rows(float* x, std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        float* row = x + r * cols;
        std::size_t j = 0;
        float mx;
        if (cols >= 8) {
            __m256 vmax = _mm256_loadu_ps(row);
            for (j = 8; j + 8 <= cols; j += 8) {
                vmax = _mm256_max_ps(vmax, _mm256_loadu_ps(row + j));
            }
            mx = hmax(vmax);
        } else {
            mx = row[0];
            j = 1;
        }
        for (; j < cols; ++j) mx = std::max(mx, row[j]);

        float sum = 0.0f;
        for (std::size_t p = 0; p < cols; ++p) {
            row[p] = std::exp(row[p] - mx);
            sum += row[p];
        }
        scale(row, 1.0f / sum, cols);
    }
}

void round_to_half(float* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m128i h = _mm256_cvtps_ph(_mm256_loadu_ps(x + i), _MM_FROUND_TO_NEAREST_INT);
        _mm256_storeu_ps(x + i, _mm256_cvtph_ps(h));
    }
    for (; i < n; ++i) x[i] = half_to_float(float_to_half(x[i]));
}

} // namespace avx2

const Ops kAvx2Ops = {
    avx2::dot,       avx2::axpy,      avx2::scale,        avx2::matmul_nt,
    avx2::matmul_nn, avx2::matmul_tn, avx2::softmax_rows, avx2::round_to_half,
};

} // namespace sensebridge::kernels

#endif // x86_64
