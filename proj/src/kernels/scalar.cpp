//==============================================================================
// scalar.cpp
// Reference kernels. These define the semantics the SIMD variants are tested
// against, so keep them plain.
//==============================================================================
#include "biharmonic/kernels.hpp"

namespace biharmonic::kernels::detail {
namespace {

void multiply(cplx* a, const cplx* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) a[i] *= b[i];
}

void combine(cplx* out, const cplx* a, const cplx* x, const cplx* b, const cplx* y,
             std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * x[i] + b[i] * y[i];
}

void accumulate(cplx* out, const cplx* a, const cplx* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] += a[i] * x[i];
}

double sum_norm(const cplx* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::norm(a[i]);
    return acc;
}

double weighted_sum_norm(const cplx* a, const double* w, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * std::norm(a[i]);
    return acc;
}

void nonlinearity(cplx* out, const cplx* u, const cplx* ux, const cplx* uxx,
                  const NonlinearWeights& c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const cplx v = u[i];
        const cplx vx = ux[i];
        const cplx vxx = uxx[i];
        const double m = std::norm(v);
        const double mx = std::norm(vx);
        out[i] = c.a1 * m * v + c.a2 * m * vxx + c.a3 * std::conj(vxx) * (v * v) +
                 c.a4 * (vx * vx) * std::conj(v) + c.a5 * mx * v + c.a6 * (m * m) * v;
    }
}

const KernelTable kTable{Isa::scalar, multiply, combine, accumulate,
                         sum_norm,    weighted_sum_norm, nonlinearity};

}  // namespace

const KernelTable& scalar_table() { return kTable; }

}  // namespace biharmonic::kernels::detail
