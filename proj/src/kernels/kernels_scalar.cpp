#include <cmath>

#include "rankzip/kernels.hpp"

namespace rankzip::kernels::scalar {

double sum(const double* x, std::size_t n) {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t body = n & ~std::size_t{3};
    for (std::size_t i = 0; i < body; i += 4) {
        lane[0] += x[i];
        lane[1] += x[i + 1];
        lane[2] += x[i + 2];
        lane[3] += x[i + 3];
    }
    double s = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (std::size_t i = body; i < n; ++i) s += x[i];
    return s;
}

void divide(double* x, std::size_t n, double divisor) {
    for (std::size_t i = 0; i < n; ++i) x[i] /= divisor;
}

std::uint32_t rank_of(const double* p, std::size_t n, std::uint32_t token) {
    const double pt = p[token];
    std::uint32_t rank = 0;
    for (std::size_t j = 0; j < token; ++j) rank += p[j] >= pt;
    for (std::size_t j = token + 1; j < n; ++j) rank += p[j] > pt;
    return rank;
}

std::uint64_t quantize(const double* p, std::size_t n, double scale, std::uint32_t* out) {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = 1u + static_cast<std::uint32_t>(std::floor(p[i] * scale));
        total += out[i];
    }
    return total;
}

}  // namespace rankzip::kernels::scalar
