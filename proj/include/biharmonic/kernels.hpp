//==============================================================================
// kernels.hpp
// Data-parallel inner loops shared by the spectral, norm and time-stepping
// code. Every kernel has a scalar reference implementation; AVX2+FMA (x86-64)
// and NEON (aarch64) variants are compiled alongside it and the best one the
// CPU supports is picked once at startup.
//
// Setting BIHARMONIC_LAB_SIMD=scalar in the environment forces the reference
// kernels, which is handy when bisecting a numerical difference.
//==============================================================================
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace biharmonic {

using cplx = std::complex<double>;

namespace kernels {

enum class Isa { scalar, avx2, neon };

// Coefficients of the pointwise nonlinearity
//   a1 u|u|^2 + a2 u_xx|u|^2 + a3 conj(u_xx) u^2 + a4 u_x^2 conj(u)
//     + a5 u|u_x|^2 + a6 u|u|^4
struct NonlinearWeights {
    double a1 = 0.0;
    double a2 = 8.0;
    double a3 = 2.0;
    double a4 = 6.0;
    double a5 = 4.0;
    double a6 = 6.0;
};

struct KernelTable {
    Isa isa;
    // a[i] *= b[i]
    void (*multiply)(cplx* a, const cplx* b, std::size_t n);
    // out[i] = a[i] * x[i] + b[i] * y[i]
    void (*combine)(cplx* out, const cplx* a, const cplx* x, const cplx* b, const cplx* y,
                    std::size_t n);
    // out[i] += a[i] * x[i]
    void (*accumulate)(cplx* out, const cplx* a, const cplx* x, std::size_t n);
    // sum |a[i]|^2
    double (*sum_norm)(const cplx* a, std::size_t n);
    // sum w[i] |a[i]|^2
    double (*weighted_sum_norm)(const cplx* a, const double* w, std::size_t n);
    // out[i] = F(u[i], ux[i], uxx[i])
    void (*nonlinearity)(cplx* out, const cplx* u, const cplx* ux, const cplx* uxx,
                         const NonlinearWeights& w, std::size_t n);
};

bool supported(Isa isa);
const KernelTable& table(Isa isa);  // throws std::invalid_argument when unsupported
const KernelTable& active();
void select(Isa isa);
std::string_view name(Isa isa);

inline void multiply(std::span<cplx> a, std::span<const cplx> b) {
    active().multiply(a.data(), b.data(), a.size());
}

inline void combine(std::span<cplx> out, std::span<const cplx> a, std::span<const cplx> x,
                    std::span<const cplx> b, std::span<const cplx> y) {
    active().combine(out.data(), a.data(), x.data(), b.data(), y.data(), out.size());
}

inline void accumulate(std::span<cplx> out, std::span<const cplx> a, std::span<const cplx> x) {
    active().accumulate(out.data(), a.data(), x.data(), out.size());
}

inline double sum_norm(std::span<const cplx> a) { return active().sum_norm(a.data(), a.size()); }

inline double weighted_sum_norm(std::span<const cplx> a, std::span<const double> w) {
    return active().weighted_sum_norm(a.data(), w.data(), a.size());
}

// Per-ISA entry points; defined in src/kernels/*.cpp.
namespace detail {
const KernelTable& scalar_table();
const KernelTable* avx2_table();  // nullptr when not compiled in
const KernelTable* neon_table();
}  // namespace detail

}  // namespace kernels
}  // namespace biharmonic
