// Lebesgue, Sobolev, modulation M^s_{2,q} and Z^s_{kappa0,q} norms of a single
// field, plus L^p_t L^q_x norms over uniformly sampled time series.
//
// Torus-to-line factors: ||u||_{L^2}^2 = L sum |c_k|^2, and the line integral
// int |u^(xi)|^2 w(xi) dxi becomes L sum_k |c_k|^2 w(xi_k).
#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "biharmonic/spectral.hpp"

namespace biharmonic {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct NormParams {
    double s = 0.0;
    double q = 2.0;
    double kappa0 = 1.0;

    // Throws std::invalid_argument unless q >= 2 (finite) and kappa0 >= 1.
    void validate() const;
};

// (sum_j |u_j|^p dx)^{1/p}; p = kInfinity gives max |u_j|. Requires p >= 1.
double lebesgue_norm(const SpectralField& field, double p);

// (L sum <xi>^{2s} |c|^2)^{1/2}, or |xi|^{2s} when homogeneous.
double sobolev_norm(const SpectralField& field, double s, bool homogeneous = false);

// ||box_n u||_{L^2} for every box centre meeting the lattice.
struct BoxProfile {
    std::int64_t first = 0;  // centre of values[0]
    std::vector<double> values;
};
BoxProfile box_l2_profile(const SpectralField& field,
                          const WindowFamily& windows = WindowFamily::cosine_squared());

double modulation_norm(const SpectralField& field, double s, double q,
                       const WindowFamily& windows = WindowFamily::cosine_squared());
double modulation_norm(const BoxProfile& profile, double s, double q);

// Inner integrals I(n) = int kappa0^2 |u^(xi + n)|^2 / (4 kappa0^2 + xi^2) dxi
// for |n| <= n_max. Beyond n_max, I(n) is replaced by its exact large-|n|
// majorant kappa0^2 M / (n - xi_max)^2 (M the mass), summed in closed form.
struct ZProfile {
    double kappa0 = 1.0;
    double mass = 0.0;
    double xi_max = 0.0;
    std::int64_t n_max = 0;
    std::vector<double> inner;  // inner[n + n_max]

    double at(std::int64_t n) const { return inner[static_cast<std::size_t>(n + n_max)]; }
};
ZProfile z_profile(const SpectralField& field, double kappa0);

struct ZNormResult {
    double value = 0.0;
    double tail = 0.0;  // upper bound on the dropped part of the q-th power
};
// Requires 0 <= s < 1 - 1/q; throws std::invalid_argument otherwise.
ZNormResult z_norm_detail(const ZProfile& profile, double s, double q);
double z_norm(const SpectralField& field, const NormParams& params);
// (sum_{lo <= n <= hi} <n>^{sq} I(n)^{q/2})^{1/q}, no tail.
double z_norm_over(const ZProfile& profile, double s, double q, std::int64_t lo, std::int64_t hi);

struct ScalingReport {
    double lambda = 1.0;
    double lhs = 0.0;  // ||f(lambda .)||_M
    double rhs = 0.0;  // lambda^e ||f||_M, e = -1/q' (lambda <= 1) or s - 1/2
    double ratio = 0.0;
};
ScalingReport scaling_check(const SpectralField& field, double lambda, const NormParams& params);

// (int_0^T g(t)^p dt)^{1/p} from samples g(t_i) on a uniform grid starting at
// t_0 = 0, trapezoid rule; a partial last interval is interpolated linearly.
// p = kInfinity takes the max over samples in [0, T].
double time_norm(std::span<const double> times, std::span<const double> values, double p,
                 double T);

double spacetime_norm(std::span<const double> times, std::span<const SpectralField> fields,
                      double p, double q, double T);

}  // namespace biharmonic
