//==============================================================================
// avx2.cpp
// AVX2 + FMA kernels. Two complex<double> values per __m256d, laid out as
// [re0, im0, re1, im1]. Odd lengths finish with the scalar reference loop.
// This translation unit is built with -mavx2 -mfma; it is only entered after
// the dispatcher has checked the CPU flags.
//==============================================================================
#include "biharmonic/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace biharmonic::kernels::detail {
namespace {

inline __m256d load(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }

inline __m256d cmul(__m256d a, __m256d b) {
    const __m256d b_re = _mm256_movedup_pd(b);
    const __m256d b_im = _mm256_permute_pd(b, 0xF);
    const __m256d a_sw = _mm256_permute_pd(a, 0x5);
    return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

inline __m256d conj(__m256d a) {
    const __m256d mask = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
    return _mm256_xor_pd(a, mask);
}

// |a|^2 broadcast to both lanes of each complex slot.
inline __m256d abs2(__m256d a) {
    const __m256d sq = _mm256_mul_pd(a, a);
    return _mm256_add_pd(sq, _mm256_permute_pd(sq, 0x5));
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void multiply(cplx* a, const cplx* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) store(a + i, cmul(load(a + i), load(b + i)));
    for (; i < n; ++i) a[i] *= b[i];
}

void combine(cplx* out, const cplx* a, const cplx* x, const cplx* b, const cplx* y,
             std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d ax = cmul(load(a + i), load(x + i));
        const __m256d by = cmul(load(b + i), load(y + i));
        store(out + i, _mm256_add_pd(ax, by));
    }
    for (; i < n; ++i) out[i] = a[i] * x[i] + b[i] * y[i];
}

void accumulate(cplx* out, const cplx* a, const cplx* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        store(out + i, _mm256_add_pd(load(out + i), cmul(load(a + i), load(x + i))));
    }
    for (; i < n; ++i) out[i] += a[i] * x[i];
}

double sum_norm(const cplx* a, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v0 = load(a + i);
        const __m256d v1 = load(a + i + 2);
        acc0 = _mm256_fmadd_pd(v0, v0, acc0);
        acc1 = _mm256_fmadd_pd(v1, v1, acc1);
    }
    for (; i + 2 <= n; i += 2) {
        const __m256d v = load(a + i);
        acc0 = _mm256_fmadd_pd(v, v, acc0);
    }
    double total = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) total += std::norm(a[i]);
    return total;
}

double weighted_sum_norm(const cplx* a, const double* w, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d v = load(a + i);
        const __m256d ww = _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(w + i)), 0x50);
        acc = _mm256_fmadd_pd(ww, _mm256_mul_pd(v, v), acc);
    }
    double total = hsum(acc);
    for (; i < n; ++i) total += w[i] * std::norm(a[i]);
    return total;
}

void nonlinearity(cplx* out, const cplx* u, const cplx* ux, const cplx* uxx,
                  const NonlinearWeights& c, std::size_t n) {
    const __m256d a1 = _mm256_set1_pd(c.a1);
    const __m256d a2 = _mm256_set1_pd(c.a2);
    const __m256d a3 = _mm256_set1_pd(c.a3);
    const __m256d a4 = _mm256_set1_pd(c.a4);
    const __m256d a5 = _mm256_set1_pd(c.a5);
    const __m256d a6 = _mm256_set1_pd(c.a6);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d v = load(u + i);
        const __m256d vx = load(ux + i);
        const __m256d vxx = load(uxx + i);
        const __m256d m = abs2(v);
        const __m256d mx = abs2(vx);
        // real factor multiplying v: a1 m + a5 mx + a6 m^2
        __m256d scale = _mm256_mul_pd(a1, m);
        scale = _mm256_fmadd_pd(a5, mx, scale);
        scale = _mm256_fmadd_pd(_mm256_mul_pd(a6, m), m, scale);
        __m256d r = _mm256_mul_pd(scale, v);
        r = _mm256_fmadd_pd(_mm256_mul_pd(a2, m), vxx, r);
        r = _mm256_fmadd_pd(a3, cmul(conj(vxx), cmul(v, v)), r);
        r = _mm256_fmadd_pd(a4, cmul(cmul(vx, vx), conj(v)), r);
        store(out + i, r);
    }
    if (i < n) scalar_table().nonlinearity(out + i, u + i, ux + i, uxx + i, c, n - i);
}

const KernelTable kTable{Isa::avx2, multiply, combine, accumulate,
                         sum_norm,  weighted_sum_norm, nonlinearity};

}  // namespace

const KernelTable* avx2_table() { return &kTable; }

}  // namespace biharmonic::kernels::detail

#else

namespace biharmonic::kernels::detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace biharmonic::kernels::detail

#endif
