#pragma once

// Vocabulary-wide inner loops used by the predictors, the rank transform and
// the arithmetic coder. Each kernel has a scalar reference and optional
// AVX2/NEON variants; the active table is chosen once at startup.
//
// Every variant must return bit-identical results to the scalar reference:
// encoder and decoder may run on different machines. Floating-point
// reductions therefore use a fixed four-lane order (lane l accumulates
// elements with index % 4 == l, lanes combine as (l0 + l1) + (l2 + l3), the
// tail is added left to right) that every ISA reproduces exactly.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace rankzip::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
    Isa isa;
    // Four-lane-ordered sum of x[0..n).
    double (*sum)(const double* x, std::size_t n);
    // x[i] /= divisor.
    void (*divide)(double* x, std::size_t n, double divisor);
    // Position of `token` under the order (probability desc, id asc):
    // #{j : p[j] > p[t]} + #{j < t : p[j] == p[t]}.
    std::uint32_t (*rank_of)(const double* p, std::size_t n, std::uint32_t token);
    // out[i] = 1 + floor(p[i] * scale); returns the sum of out.
    std::uint64_t (*quantize)(const double* p, std::size_t n, double scale, std::uint32_t* out);
};

namespace scalar {
double sum(const double* x, std::size_t n);
void divide(double* x, std::size_t n, double divisor);
std::uint32_t rank_of(const double* p, std::size_t n, std::uint32_t token);
std::uint64_t quantize(const double* p, std::size_t n, double scale, std::uint32_t* out);
}  // namespace scalar

/// Table for `isa`, or nullptr when it was not compiled in or the CPU lacks it.
const KernelTable* table_for(Isa isa) noexcept;

/// Active table. Initially the widest supported ISA, unless the environment
/// variable RANKZIP_KERNELS names another one (scalar, avx2, neon).
const KernelTable& active() noexcept;

/// Switches the active table; returns false (and changes nothing) if `isa` is
/// unavailable. Not synchronized: call before starting worker threads.
bool select(Isa isa) noexcept;

inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }
inline void divide(std::span<double> x, double divisor) {
    active().divide(x.data(), x.size(), divisor);
}
inline std::uint32_t rank_of(std::span<const double> p, std::uint32_t token) {
    return active().rank_of(p.data(), p.size(), token);
}
inline std::uint64_t quantize(std::span<const double> p, double scale, std::span<std::uint32_t> out) {
    return active().quantize(p.data(), p.size(), scale, out.data());
}

}  // namespace rankzip::kernels
