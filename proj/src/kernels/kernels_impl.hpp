#pragma once

#include "rankzip/kernels.hpp"

namespace rankzip::kernels {

#define RANKZIP_DECLARE_KERNELS(ns)                                                             \
    namespace ns {                                                                              \
    double sum(const double* x, std::size_t n);                                                 \
    void divide(double* x, std::size_t n, double divisor);                                      \
    std::uint32_t rank_of(const double* p, std::size_t n, std::uint32_t token);                 \
    std::uint64_t quantize(const double* p, std::size_t n, double scale, std::uint32_t* out);   \
    }

#if defined(RANKZIP_HAVE_AVX2)
RANKZIP_DECLARE_KERNELS(avx2)
#endif
#if defined(RANKZIP_HAVE_NEON)
RANKZIP_DECLARE_KERNELS(neon)
#endif

#undef RANKZIP_DECLARE_KERNELS

}  // namespace rankzip::kernels
