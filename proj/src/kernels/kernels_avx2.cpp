// Compiled with -mavx2 (and without FMA contraction); only called after a
// runtime CPU check.

#include <immintrin.h>

#include <bit>
#include <cmath>

#include "kernels_impl.hpp"

namespace rankzip::kernels::avx2 {

double sum(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const std::size_t body = n & ~std::size_t{3};
    for (std::size_t i = 0; i < body; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    double s = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (std::size_t i = body; i < n; ++i) s += x[i];
    return s;
}

void divide(double* x, std::size_t n, double divisor) {
    const __m256d d = _mm256_set1_pd(divisor);
    const std::size_t body = n & ~std::size_t{3};
    for (std::size_t i = 0; i < body; i += 4) {
        _mm256_storeu_pd(x + i, _mm256_div_pd(_mm256_loadu_pd(x + i), d));
    }
    for (std::size_t i = body; i < n; ++i) x[i] /= divisor;
}

namespace {

template <int Predicate>
std::uint32_t count_cmp(const double* p, std::size_t begin, std::size_t end, double pt) {
    const __m256d t = _mm256_set1_pd(pt);
    std::uint32_t count = 0;
    std::size_t j = begin;
    for (; j + 4 <= end; j += 4) {
        const __m256d m = _mm256_cmp_pd(_mm256_loadu_pd(p + j), t, Predicate);
        count += static_cast<std::uint32_t>(std::popcount(static_cast<unsigned>(_mm256_movemask_pd(m))));
    }
    for (; j < end; ++j) {
        if constexpr (Predicate == _CMP_GE_OQ) {
            count += p[j] >= pt;
        } else {
            count += p[j] > pt;
        }
    }
    return count;
}

}  // namespace

std::uint32_t rank_of(const double* p, std::size_t n, std::uint32_t token) {
    const double pt = p[token];
    return count_cmp<_CMP_GE_OQ>(p, 0, token, pt) + count_cmp<_CMP_GT_OQ>(p, token + 1, n, pt);
}

std::uint64_t quantize(const double* p, std::size_t n, double scale, std::uint32_t* out) {
    const __m256d s = _mm256_set1_pd(scale);
    const __m128i one = _mm_set1_epi32(1);
    __m256i acc = _mm256_setzero_si256();
    const std::size_t body = n & ~std::size_t{3};
    for (std::size_t i = 0; i < body; i += 4) {
        const __m256d f = _mm256_floor_pd(_mm256_mul_pd(_mm256_loadu_pd(p + i), s));
        const __m128i q = _mm_add_epi32(_mm256_cvttpd_epi32(f), one);
        _mm_storeu_si128(reinterpret_cast<__m128i*>(out + i), q);
        acc = _mm256_add_epi64(acc, _mm256_cvtepu32_epi64(q));
    }
    alignas(32) std::uint64_t lane[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lane), acc);
    std::uint64_t total = lane[0] + lane[1] + lane[2] + lane[3];
    for (std::size_t i = body; i < n; ++i) {
        out[i] = 1u + static_cast<std::uint32_t>(std::floor(p[i] * scale));
        total += out[i];
    }
    return total;
}

}  // namespace rankzip::kernels::avx2
