// AArch64 only. Two float64x2 registers stand in for the four reference lanes.

#include <arm_neon.h>

#include <cmath>

#include "kernels_impl.hpp"

namespace rankzip::kernels::neon {

double sum(const double* x, std::size_t n) {
    float64x2_t lo = vdupq_n_f64(0.0);  // lanes 0, 1
    float64x2_t hi = vdupq_n_f64(0.0);  // lanes 2, 3
    const std::size_t body = n & ~std::size_t{3};
    for (std::size_t i = 0; i < body; i += 4) {
        lo = vaddq_f64(lo, vld1q_f64(x + i));
        hi = vaddq_f64(hi, vld1q_f64(x + i + 2));
    }
    double s = (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) +
               (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
    for (std::size_t i = body; i < n; ++i) s += x[i];
    return s;
}

void divide(double* x, std::size_t n, double divisor) {
    const float64x2_t d = vdupq_n_f64(divisor);
    const std::size_t body = n & ~std::size_t{1};
    for (std::size_t i = 0; i < body; i += 2) vst1q_f64(x + i, vdivq_f64(vld1q_f64(x + i), d));
    for (std::size_t i = body; i < n; ++i) x[i] /= divisor;
}

std::uint32_t rank_of(const double* p, std::size_t n, std::uint32_t token) {
    const double pt = p[token];
    const float64x2_t t = vdupq_n_f64(pt);
    std::uint64_t count = 0;
    std::size_t j = 0;
    // Comparison lanes are all-ones (== 2^64 - 1) when true; subtracting
    // accumulates +1 per hit.
    uint64x2_t acc = vdupq_n_u64(0);
    for (; j + 2 <= token; j += 2) acc = vsubq_u64(acc, vcgeq_f64(vld1q_f64(p + j), t));
    for (; j < token; ++j) count += p[j] >= pt;
    j = static_cast<std::size_t>(token) + 1;
    for (; j + 2 <= n; j += 2) acc = vsubq_u64(acc, vcgtq_f64(vld1q_f64(p + j), t));
    for (; j < n; ++j) count += p[j] > pt;
    count += vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1);
    return static_cast<std::uint32_t>(count);
}

std::uint64_t quantize(const double* p, std::size_t n, double scale, std::uint32_t* out) {
    const float64x2_t s = vdupq_n_f64(scale);
    std::uint64_t total = 0;
    const std::size_t body = n & ~std::size_t{1};
    for (std::size_t i = 0; i < body; i += 2) {
        const uint64x2_t q =
            vaddq_u64(vcvtq_u64_f64(vrndmq_f64(vmulq_f64(vld1q_f64(p + i), s))), vdupq_n_u64(1));
        out[i] = static_cast<std::uint32_t>(vgetq_lane_u64(q, 0));
        out[i + 1] = static_cast<std::uint32_t>(vgetq_lane_u64(q, 1));
        total += out[i] + out[i + 1];
    }
    for (std::size_t i = body; i < n; ++i) {
        out[i] = 1u + static_cast<std::uint32_t>(std::floor(p[i] * scale));
        total += out[i];
    }
    return total;
}

}  // namespace rankzip::kernels::neon
