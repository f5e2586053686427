#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace rankzip::kernels {

std::string_view to_string(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "unknown";
}

namespace {

constexpr KernelTable kScalar{Isa::Scalar, scalar::sum, scalar::divide, scalar::rank_of,
                              scalar::quantize};
#if defined(RANKZIP_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::Avx2, avx2::sum, avx2::divide, avx2::rank_of, avx2::quantize};
#endif
#if defined(RANKZIP_HAVE_NEON)
constexpr KernelTable kNeon{Isa::Neon, neon::sum, neon::divide, neon::rank_of, neon::quantize};
#endif

bool cpu_has_avx2() noexcept {
#if defined(RANKZIP_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const KernelTable* widest() noexcept {
    if (const auto* t = table_for(Isa::Avx2)) return t;
    if (const auto* t = table_for(Isa::Neon)) return t;
    return &kScalar;
}

const KernelTable* initial() noexcept {
    if (const char* env = std::getenv("RANKZIP_KERNELS")) {
        const std::string_view name(env);
        for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
            if (name == to_string(isa)) {
                if (const auto* t = table_for(isa)) return t;
            }
        }
    }
    return widest();
}

std::atomic<const KernelTable*>& current() noexcept {
    static std::atomic<const KernelTable*> table{initial()};
    return table;
}

}  // namespace

const KernelTable* table_for(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return &kScalar;
        case Isa::Avx2:
#if defined(RANKZIP_HAVE_AVX2)
            if (cpu_has_avx2()) return &kAvx2;
#endif
            return nullptr;
        case Isa::Neon:
#if defined(RANKZIP_HAVE_NEON)
            return &kNeon;
#else
            return nullptr;
#endif
    }
    return nullptr;
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_relaxed); }

bool select(Isa isa) noexcept {
    const KernelTable* t = table_for(isa);
    if (t == nullptr) return false;
    current().store(t, std::memory_order_relaxed);
    return true;
}

}  // namespace rankzip::kernels
