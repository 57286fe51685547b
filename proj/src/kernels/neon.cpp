//==============================================================================
// neon.cpp
// aarch64 NEON kernels, one complex<double> per float64x2_t.
//==============================================================================
#include "biharmonic/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>

namespace biharmonic::kernels::detail {
namespace {

inline float64x2_t load(const cplx* p) { return vld1q_f64(reinterpret_cast<const double*>(p)); }
inline void store(cplx* p, float64x2_t v) { vst1q_f64(reinterpret_cast<double*>(p), v); }

inline float64x2_t cmul(float64x2_t a, float64x2_t b) {
    const float64x2_t sign = {-1.0, 1.0};
    const float64x2_t b_re = vdupq_laneq_f64(b, 0);
    const float64x2_t b_im = vdupq_laneq_f64(b, 1);
    const float64x2_t a_sw = vextq_f64(a, a, 1);
    return vfmaq_f64(vmulq_f64(a, b_re), vmulq_f64(a_sw, b_im), sign);
}

inline float64x2_t conj(float64x2_t a) {
    const float64x2_t sign = {1.0, -1.0};
    return vmulq_f64(a, sign);
}

inline float64x2_t abs2(float64x2_t a) {
    const float64x2_t sq = vmulq_f64(a, a);
    return vdupq_n_f64(vaddvq_f64(sq));
}

void multiply(cplx* a, const cplx* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) store(a + i, cmul(load(a + i), load(b + i)));
}

void combine(cplx* out, const cplx* a, const cplx* x, const cplx* b, const cplx* y,
             std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        store(out + i, vaddq_f64(cmul(load(a + i), load(x + i)), cmul(load(b + i), load(y + i))));
    }
}

void accumulate(cplx* out, const cplx* a, const cplx* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        store(out + i, vaddq_f64(load(out + i), cmul(load(a + i), load(x + i))));
    }
}

double sum_norm(const cplx* a, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t v0 = load(a + i);
        const float64x2_t v1 = load(a + i + 1);
        acc0 = vfmaq_f64(acc0, v0, v0);
        acc1 = vfmaq_f64(acc1, v1, v1);
    }
    double total = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) total += std::norm(a[i]);
    return total;
}

double weighted_sum_norm(const cplx* a, const double* w, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const float64x2_t v = load(a + i);
        acc = vfmaq_f64(acc, vdupq_n_f64(w[i]), vmulq_f64(v, v));
    }
    return vaddvq_f64(acc);
}

void nonlinearity(cplx* out, const cplx* u, const cplx* ux, const cplx* uxx,
                  const NonlinearWeights& c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const float64x2_t v = load(u + i);
        const float64x2_t vx = load(ux + i);
        const float64x2_t vxx = load(uxx + i);
        const float64x2_t m = abs2(v);
        const float64x2_t mx = abs2(vx);
        float64x2_t scale = vmulq_n_f64(m, c.a1);
        scale = vfmaq_n_f64(scale, mx, c.a5);
        scale = vfmaq_f64(scale, vmulq_n_f64(m, c.a6), m);
        float64x2_t r = vmulq_f64(scale, v);
        r = vfmaq_f64(r, vmulq_n_f64(m, c.a2), vxx);
        r = vfmaq_n_f64(r, cmul(conj(vxx), cmul(v, v)), c.a3);
        r = vfmaq_n_f64(r, cmul(cmul(vx, vx), conj(v)), c.a4);
        store(out + i, r);
    }
}

const KernelTable kTable{Isa::neon, multiply, combine, accumulate,
                         sum_norm,  weighted_sum_norm, nonlinearity};

}  // namespace

const KernelTable* neon_table() { return &kTable; }

}  // namespace biharmonic::kernels::detail

#else

namespace biharmonic::kernels::detail {
const KernelTable* neon_table() { return nullptr; }
}  // namespace biharmonic::kernels::detail

#endif
