#include "biharmonic/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "biharmonic/kernels.hpp"

namespace biharmonic {
namespace {

double japanese(double x) { return std::sqrt(1.0 + x * x); }

void check_q(double q) {
    if (!(q >= 2.0) || !std::isfinite(q)) {
        throw std::invalid_argument("summation index q must satisfy 2 <= q < inf");
    }
}

}  // namespace

void NormParams::validate() const {
    check_q(q);
    if (!(kappa0 >= 1.0)) throw std::invalid_argument("kappa0 must be >= 1");
    if (!std::isfinite(s)) throw std::invalid_argument("regularity s must be finite");
}

double lebesgue_norm(const SpectralField& field, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("Lebesgue exponent must be >= 1");
    const auto u = field.physical();
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& v : u) m = std::max(m, std::abs(v));
        return m;
    }
    const double dx = field.grid().spacing();
    if (p == 2.0) return std::sqrt(kernels::sum_norm(u) * dx);
    double total = 0.0;
    for (const auto& v : u) total += std::pow(std::abs(v), p);
    return std::pow(total * dx, 1.0 / p);
}

double sobolev_norm(const SpectralField& field, double s, bool homogeneous) {
    const auto& grid = field.grid();
    std::vector<double> w(grid.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double xi = grid.frequency(i);
        if (homogeneous) {
            w[i] = xi == 0.0 ? (s == 0.0 ? 1.0 : 0.0) : std::pow(std::abs(xi), 2.0 * s);
        } else {
            w[i] = std::pow(1.0 + xi * xi, s);
        }
    }
    return std::sqrt(grid.box_length() * kernels::weighted_sum_norm(field.spectrum(), w));
}

// Each mode feeds at most two windows, so the profile costs O(N) rather than
// one projection per box.
BoxProfile box_l2_profile(const SpectralField& field, const WindowFamily& windows) {
    const auto& grid = field.grid();
    const auto [lo, hi] = box_range(grid);
    BoxProfile profile;
    profile.first = lo;
    profile.values.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
    const auto c = field.spectrum();
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double xi = grid.frequency(i);
        const double a = std::norm(c[i]);
        if (a == 0.0) continue;
        const auto n0 = static_cast<std::int64_t>(std::floor(xi));
        for (std::int64_t n = n0; n <= n0 + 1; ++n) {
            const double psi = windows.shifted(xi, n);
            if (psi != 0.0) profile.values[static_cast<std::size_t>(n - lo)] += psi * psi * a;
        }
    }
    for (auto& v : profile.values) v = std::sqrt(grid.box_length() * v);
    return profile;
}

double modulation_norm(const BoxProfile& profile, double s, double q) {
    check_q(q);
    double total = 0.0;
    for (std::size_t i = 0; i < profile.values.size(); ++i) {
        const double v = profile.values[i];
        if (v == 0.0) continue;
        const double n = static_cast<double>(profile.first + static_cast<std::int64_t>(i));
        total += std::pow(japanese(n), s * q) * std::pow(v, q);
    }
    return std::pow(total, 1.0 / q);
}

double modulation_norm(const SpectralField& field, double s, double q,
                       const WindowFamily& windows) {
    return modulation_norm(box_l2_profile(field, windows), s, q);
}

ZProfile z_profile(const SpectralField& field, double kappa0) {
    if (!(kappa0 >= 1.0)) throw std::invalid_argument("kappa0 must be >= 1");
    const auto& grid = field.grid();
    const double L = grid.box_length();

    // Only modes carrying mass enter the sums.
    std::vector<double> xi;
    std::vector<double> weight;
    ZProfile z;
    z.kappa0 = kappa0;
    const auto c = field.spectrum();
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double a = std::norm(c[i]);
        if (a == 0.0) continue;
        xi.push_back(grid.frequency(i));
        weight.push_back(L * a);
        z.mass += L * a;
        z.xi_max = std::max(z.xi_max, std::abs(xi.back()));
    }
    z.n_max = std::max<std::int64_t>(4096, static_cast<std::int64_t>(std::ceil(16.0 * z.xi_max)));
    z.inner.assign(static_cast<std::size_t>(2 * z.n_max + 1), 0.0);

    const double k2 = kappa0 * kappa0;
    for (std::int64_t n = -z.n_max; n <= z.n_max; ++n) {
        double total = 0.0;
        const auto dn = static_cast<double>(n);
        for (std::size_t m = 0; m < xi.size(); ++m) {
            const double d = xi[m] - dn;
            total += weight[m] / (4.0 * k2 + d * d);
        }
        z.inner[static_cast<std::size_t>(n + z.n_max)] = k2 * total;
    }
    return z;
}

double z_norm_over(const ZProfile& profile, double s, double q, std::int64_t lo, std::int64_t hi) {
    check_q(q);
    lo = std::max(lo, -profile.n_max);
    hi = std::min(hi, profile.n_max);
    double total = 0.0;
    for (std::int64_t n = lo; n <= hi; ++n) {
        const double v = profile.at(n);
        if (v == 0.0) continue;
        total += std::pow(japanese(static_cast<double>(n)), s * q) * std::pow(v, 0.5 * q);
    }
    return std::pow(total, 1.0 / q);
}

ZNormResult z_norm_detail(const ZProfile& profile, double s, double q) {
    check_q(q);
    if (!(s >= 0.0) || !(s < 1.0 - 1.0 / q)) {
        throw std::invalid_argument("Z-norm needs 0 <= s < 1 - 1/q (s = " + std::to_string(s) +
                                    ", q = " + std::to_string(q) + ")");
    }
    const double head = std::pow(z_norm_over(profile, s, q, -profile.n_max, profile.n_max), q);
    if (profile.mass == 0.0) return {0.0, 0.0};

    // For |n| > n_max >= 16 xi_max, I(n) ~ kappa0^2 M / n^2; the two-sided sum
    // of <n>^{sq} n^{-q} is approximated by its integral from n_max + 1/2.
    const double expo = s * q - q + 1.0;  // < 0 by the s-condition
    const double amp = std::pow(profile.kappa0 * profile.kappa0 * profile.mass, 0.5 * q);
    const double nm = static_cast<double>(profile.n_max);
    const double estimate = 2.0 * amp * std::pow(nm + 0.5, expo) / (-expo);
    // Rigorous majorant: (|n| - xi_max) >= (15/16)|n| and <n> <= (1 + 1/nm^2)^{1/2} |n|.
    const double slack = std::pow(16.0 / 15.0, q) * std::pow(1.0 + 1.0 / (nm * nm), 0.5 * s * q);
    const double bound = 2.0 * amp * slack * std::pow(nm, expo) / (-expo);

    return {std::pow(head + estimate, 1.0 / q), bound};
}

double z_norm(const SpectralField& field, const NormParams& params) {
    params.validate();
    return z_norm_detail(z_profile(field, params.kappa0), params.s, params.q).value;
}

ScalingReport scaling_check(const SpectralField& field, double lambda, const NormParams& params) {
    if (!(lambda > 0.0)) throw std::invalid_argument("scaling factor must be positive");
    check_q(params.q);
    ScalingReport r;
    r.lambda = lambda;
    r.lhs = modulation_norm(dilate(field, lambda), params.s, params.q);
    const double base = modulation_norm(field, params.s, params.q);
    const double q_conj = params.q / (params.q - 1.0);
    const double expo = lambda <= 1.0 ? -1.0 / q_conj : params.s - 0.5;
    r.rhs = std::pow(lambda, expo) * base;
    r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : 0.0;
    return r;
}

double time_norm(std::span<const double> times, std::span<const double> values, double p,
                 double T) {
    if (times.empty()) throw std::invalid_argument("empty time series");
    if (times.size() != values.size()) throw std::invalid_argument("time/value length mismatch");
    if (!(p >= 1.0)) throw std::invalid_argument("time exponent must be >= 1");
    if (!(T >= 0.0)) throw std::invalid_argument("horizon must be non-negative");
    const double span = times.back() - times.front();
    if (T > span * (1.0 + 1e-12) + 1e-300) {
        throw std::invalid_argument("horizon exceeds the sampled time span");
    }
    if (times.size() > 1) {
        const double h = times[1] - times[0];
        for (std::size_t i = 1; i < times.size(); ++i) {
            if (std::abs(times[i] - times[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)) ||
                !(times[i] > times[i - 1])) {
                throw std::invalid_argument("time samples must be uniform and increasing");
            }
        }
    }

    const double t0 = times.front();
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t i = 0; i < times.size() && times[i] - t0 <= T * (1.0 + 1e-12); ++i) {
            m = std::max(m, values[i]);
        }
        return m;
    }
    double total = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double a = times[i - 1] - t0;
        const double b = times[i] - t0;
        if (a >= T) break;
        const double fa = std::pow(values[i - 1], p);
        double fb = std::pow(values[i], p);
        double width = b - a;
        if (b > T) {
            const double theta = (T - a) / (b - a);
            fb = fa + theta * (fb - fa);
            width = T - a;
        }
        total += 0.5 * width * (fa + fb);
    }
    return std::pow(total, 1.0 / p);
}

double spacetime_norm(std::span<const double> times, std::span<const SpectralField> fields,
                      double p, double q, double T) {
    if (fields.size() != times.size()) throw std::invalid_argument("time/field length mismatch");
    if (fields.empty()) throw std::invalid_argument("empty trajectory");
    std::vector<double> g(fields.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = lebesgue_norm(fields[i], q);
    return time_norm(times, g, p, T);
}

}  // namespace biharmonic
