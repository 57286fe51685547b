#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "biharmonic/kernels.hpp"

namespace biharmonic::kernels {
namespace {

bool cpu_has(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(__x86_64__) || defined(__i386__)
            return detail::avx2_table() != nullptr && __builtin_cpu_supports("avx2") &&
                   __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::neon:
            // NEON is architecturally mandatory on aarch64.
            return detail::neon_table() != nullptr;
    }
    return false;
}

const KernelTable* best_available() {
    if (const char* env = std::getenv("BIHARMONIC_LAB_SIMD")) {
        const std::string forced(env);
        if (forced == "scalar") return &detail::scalar_table();
        if (forced == "avx2" && cpu_has(Isa::avx2)) return detail::avx2_table();
        if (forced == "neon" && cpu_has(Isa::neon)) return detail::neon_table();
    }
    if (cpu_has(Isa::avx2)) return detail::avx2_table();
    if (cpu_has(Isa::neon)) return detail::neon_table();
    return &detail::scalar_table();
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> table{best_available()};
    return table;
}

}  // namespace

bool supported(Isa isa) { return cpu_has(isa); }

const KernelTable& table(Isa isa) {
    if (!cpu_has(isa)) {
        throw std::invalid_argument("kernel set '" + std::string(name(isa)) +
                                    "' is not available on this CPU/build");
    }
    switch (isa) {
        case Isa::avx2:
            return *detail::avx2_table();
        case Isa::neon:
            return *detail::neon_table();
        case Isa::scalar:
            break;
    }
    return detail::scalar_table();
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void select(Isa isa) { current().store(&table(isa), std::memory_order_release); }

std::string_view name(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return "scalar";
        case Isa::avx2:
            return "avx2";
        case Isa::neon:
            return "neon";
    }
    return "unknown";
}

}  // namespace biharmonic::kernels
