#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "sensebridge/kernels.hpp"

namespace sensebridge::kernels {

std::uint16_t float_to_half(float value) {
    const std::uint32_t x = std::bit_cast<std::uint32_t>(value);
    const std::uint32_t sign = (x >> 16) & 0x8000u;
    std::uint32_t mant = x & 0x7fffffu;
    const std::uint32_t biased = (x >> 23) & 0xffu;

    if (biased == 0xffu) { // inf / nan
        std::uint32_t payload = mant ? (0x200u | (mant >> 13)) : 0u;
        return static_cast<std::uint16_t>(sign | 0x7c00u | payload);
    }
    const int exp = static_cast<int>(biased) - 127 + 15;
    if (exp >= 0x1f) return static_cast<std::uint16_t>(sign | 0x7c00u); // overflow -> inf
    if (exp <= 0) {
        if (exp < -10) return static_cast<std::uint16_t>(sign); // underflow -> signed zero
        mant |= 0x800000u;
        const std::uint32_t shift = static_cast<std::uint32_t>(14 - exp);
        std::uint32_t half = mant >> shift;
        const std::uint32_t rem = mant & ((1u << shift) - 1u);
        const std::uint32_t mid = 1u << (shift - 1);
        if (rem > mid || (rem == mid && (half & 1u))) ++half;
        return static_cast<std::uint16_t>(sign | half);
    }
    std::uint32_t half = sign | (static_cast<std::uint32_t>(exp) << 10) | (mant >> 13);
    const std::uint32_t rem = mant & 0x1fffu;
    if (rem > 0x1000u || (rem == 0x1000u && (half & 1u))) ++half; // carry may bump the exponent
    return static_cast<std::uint16_t>(half);
}

float half_to_float(std::uint16_t half) {
    const std::uint32_t sign = static_cast<std::uint32_t>(half & 0x8000u) << 16;
    std::uint32_t exp = (half >> 10) & 0x1fu;
    std::uint32_t mant = half & 0x3ffu;
    std::uint32_t x;
    if (exp == 0) {
        if (mant == 0) {
            x = sign;
        } else {
            exp = 127 - 15 + 1;
            while (!(mant & 0x400u)) {
                mant <<= 1;
                --exp;
            }
            mant &= 0x3ffu;
            x = sign | (exp << 23) | (mant << 13);
        }
    } else if (exp == 0x1fu) {
        x = sign | 0x7f800000u | (mant << 13);
    } else {
        x = sign | ((exp - 15 + 127) << 23) | (mant << 13);
    }
    return std::bit_cast<float>(x);
}

namespace scalar {

float dot(const float* a, const float* b, std::size_t n) {
    float acc = 0.0f;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy(float alpha, const float* x, float* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(float* x, float alpha, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void matmul_nt(const float* a, const float* b, float* c, std::size_t m, std::size_t k,
               std::size_t n, bool accumulate) {
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            float acc = dot(a + i * k, b + j * k, k);
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
        float mx = row[0];
        for (std::size_t j = 1; j < cols; ++j) mx = std::max(mx, row[j]);
        float sum = 0.0f;
        for (std::size_t j = 0; j < cols; ++j) {
            row[j] = std::exp(row[j] - mx);
            sum += row[j];
        }
        const float inv = 1.0f / sum;
        for (std::size_t j = 0; j < cols; ++j) row[j] *= inv;
    }
}

void round_to_half(float* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] = half_to_float(float_to_half(x[i]));
}

} // namespace scalar

const Ops kScalarOps = {
    scalar::dot,       scalar::axpy,      scalar::scale,         scalar::matmul_nt,
    scalar::matmul_nn, scalar::matmul_tn, scalar::softmax_rows,  scalar::round_to_half,
};

} // namespace sensebridge::kernels
