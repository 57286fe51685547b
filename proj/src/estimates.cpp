#include "biharmonic/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "biharmonic/norms.hpp"
#include "biharmonic/parallel.hpp"
#include "fft.hpp"

namespace biharmonic {
namespace {

constexpr double kPi = std::numbers::pi;

// Time-uniform samples t_i = T i / (n - 1).
std::vector<double> time_grid(double horizon, std::size_t samples) {
    samples = std::max<std::size_t>(samples, 2);
    std::vector<double> t(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        t[i] = horizon * static_cast<double>(i) / static_cast<double>(samples - 1);
    }
    return t;
}

double lq_samples(const std::vector<cplx>& u, double dx, double q) {
    if (std::isinf(q)) {
        double m = 0.0;
        for (const auto& v : u) m = std::max(m, std::abs(v));
        return m;
    }
    double total = 0.0;
    if (q == 2.0) {
        for (const auto& v : u) total += std::norm(v);
        return std::sqrt(total * dx);
    }
    if (q == 4.0) {
        for (const auto& v : u) {
            const double a = std::norm(v);
            total += a * a;
        }
        return std::pow(total * dx, 0.25);
    }
    for (const auto& v : u) total += std::pow(std::abs(v), q);
    return std::pow(total * dx, 1.0 / q);
}

std::size_t next_pow2(double x) {
    std::size_t n = 8;
    while (static_cast<double>(n) < x) n *= 2;
    return n;
}

double japanese(double x) { return std::sqrt(1.0 + x * x); }

// Unitarity anchor on one packet: trapezoid of ||u(t)||_2^2 over the horizon.
double calibration(const BandPacket& packet, const std::vector<double>& times) {
    const double dx = packet.base.grid().spacing();
    std::vector<double> l2(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        l2[i] = lq_samples(evolve_baseband(packet, times[i]), dx, 2.0);
    }
    const double measured = time_norm(times, l2, 2.0, times.back());
    const double expected = std::sqrt(times.back()) * packet_l2(packet);
    return expected > 0.0 ? std::abs(measured - expected) / expected : 0.0;
}

}  // namespace

bool is_admissible(double p, double q, PairKind kind) {
    if (!(p >= 2.0) || !(q >= 2.0)) return false;
    const double ip = std::isinf(p) ? 0.0 : 1.0 / p;
    const double iq = std::isinf(q) ? 0.0 : 1.0 / q;
    const double lhs = (kind == PairKind::biharmonic ? 4.0 : 2.0) * ip + iq;
    return std::abs(lhs - 0.5) <= 1e-12;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    // splitmix64 finaliser over a mixed key.
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (a + 1) + 0xBF58476D1CE4E5B9ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

BandPacket random_packet(const SpectralGrid& coarse, const PacketSpec& spec, std::uint64_t seed) {
    if (!(spec.hi > spec.lo) || !(spec.envelope > 0.0)) {
        throw std::invalid_argument("packet needs lo < hi and a positive envelope");
    }
    const double step = coarse.frequency_step();
    const auto carrier =
        spec.symmetric ? std::int64_t{0}
                       : static_cast<std::int64_t>(std::llround(0.5 * (spec.lo + spec.hi) / step));
    const double shift = step * static_cast<double>(carrier);
    const double margin = std::min(6.0 / spec.envelope, 0.25 * (spec.hi - spec.lo));

    auto inside = [&](double xi, double pad) {
        const double a = spec.symmetric ? std::abs(xi) : xi;
        return a >= spec.lo + pad && a <= spec.hi - pad;
    };
    if (spec.symmetric ? spec.hi > coarse.max_frequency()
                       : std::max(std::abs(spec.lo - shift), std::abs(spec.hi - shift)) >
                             coarse.max_frequency()) {
        throw std::invalid_argument("packet support is not resolved by the baseband grid");
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mag(0.5, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::vector<cplx> c(coarse.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i == coarse.nyquist_index()) continue;
        if (!inside(coarse.frequency(i) + shift, margin)) continue;
        const double r = mag(rng);
        c[i] = std::polar(r, phase(rng));
    }
    const SpectralField raw = synthesize(std::move(c), coarse);

    std::vector<cplx> u(raw.physical().begin(), raw.physical().end());
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double y = (coarse.position(j) - spec.center) / spec.envelope;
        u[j] *= std::exp(-y * y);
    }
    const SpectralField enveloped = analyze(std::move(u), coarse);
    const SpectralField projected = apply_multiplier(enveloped, [&](double xi) {
        return inside(xi + shift, 0.0) ? cplx(1.0) : cplx(0.0);
    });
    return BandPacket{carrier, projected};
}

std::vector<cplx> evolve_baseband(const BandPacket& packet, double t) {
    const auto& grid = packet.base.grid();
    const std::size_t n = grid.size();
    const double shift = grid.frequency_step() * static_cast<double>(packet.carrier);
    std::vector<cplx> c(n);
    const auto src = packet.base.spectrum();
    for (std::size_t i = 0; i < n; ++i) {
        if (src[i] == cplx{}) continue;
        const double xi = grid.frequency(i) + shift;
        const double xi2 = xi * xi;
        const double sign = (grid.wavenumber(i) & 1) ? -1.0 : 1.0;
        c[i] = sign * src[i] * std::polar(1.0, t * xi2 * xi2);
    }
    std::vector<cplx> u(n);
    fft::backward(c.data(), u.data(), n);
    return u;
}

double packet_l2(const BandPacket& packet) { return lebesgue_norm(packet.base, 2.0); }

std::vector<double> SweepReport::means() const {
    std::vector<double> m;
    for (const auto& r : ratios) {
        double acc = 0.0;
        for (double v : r) acc += std::log(v);
        m.push_back(r.empty() ? 0.0 : std::exp(acc / static_cast<double>(r.size())));
    }
    return m;
}

void fit_loglog(SweepReport& report) {
    std::vector<double> xs, ys;
    report.max_ratio = 0.0;
    for (std::size_t i = 0; i < report.parameters.size(); ++i) {
        for (double r : report.ratios[i]) {
            report.max_ratio = std::max(report.max_ratio, r);
            if (!(r > 0.0) || !std::isfinite(r)) continue;
            xs.push_back(std::log(report.parameters[i]));
            ys.push_back(std::log(r));
        }
    }
    const auto n = static_cast<double>(xs.size());
    if (xs.size() < 2) return;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) {
        report.slope = 0.0;
        report.intercept = my;
        return;
    }
    report.slope = sxy / sxx;
    report.intercept = my - report.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - report.intercept - report.slope * xs[i];
        ssr += r * r;
    }
    report.slope_stderr = xs.size() > 2 ? std::sqrt(ssr / (n - 2.0) / sxx) : 0.0;
}

SweepReport strichartz_sweep(const StrichartzSweep& cfg) {
    if (!is_admissible(cfg.p, cfg.q, cfg.kind)) {
        throw std::invalid_argument(
            "(p, q) is not " +
            std::string(cfg.kind == PairKind::biharmonic ? "biharmonic" : "Strichartz") +
            " admissible");
    }
    if (cfg.ensemble < 1 || cfg.levels.empty()) throw std::invalid_argument("empty sweep");
    const SpectralGrid grid(cfg.box_length, cfg.points);

    SweepReport rep;
    rep.name = "strichartz";
    rep.parameter_name = "N";
    rep.parameters = cfg.levels;
    rep.ensemble = cfg.ensemble;
    rep.seed = cfg.seed;
    rep.ratios.assign(cfg.levels.size(), std::vector<double>(cfg.ensemble));
    for (double n : cfg.levels) {
        if (!(n >= 1.0)) throw std::invalid_argument("dyadic level must be >= 1");
        if (n >= grid.max_frequency()) throw std::invalid_argument("level exceeds grid resolution");
        rep.horizons.push_back(cfg.horizon_scale * cfg.envelope_scale / std::pow(n, 4.0));
    }

    const std::size_t jobs = cfg.levels.size() * cfg.ensemble;
    parallel_for(jobs, [&](std::size_t job) {
        const std::size_t li = job / cfg.ensemble;
        const std::size_t si = job % cfg.ensemble;
        const double n = cfg.levels[li];
        const PacketSpec spec{0.5 * n, n * (1.0 - 1e-12), true, cfg.envelope_scale / n, 0.0};
        const BandPacket packet = random_packet(grid, spec, derive_seed(cfg.seed, li, si));
        const auto times = time_grid(rep.horizons[li], cfg.time_samples);
        std::vector<double> g(times.size());
        for (std::size_t i = 0; i < times.size(); ++i) {
            g[i] = lq_samples(evolve_baseband(packet, times[i]), grid.spacing(), cfg.q);
        }
        const double weight =
            cfg.kind == PairKind::strichartz && !std::isinf(cfg.p) ? std::pow(japanese(n), 2.0 / cfg.p)
                                                                   : 1.0;
        rep.ratios[li][si] = time_norm(times, g, cfg.p, times.back()) / packet_l2(packet) * weight;
    });

    const double n0 = cfg.levels.front();
    const BandPacket first = random_packet(
        grid, {0.5 * n0, n0 * (1.0 - 1e-12), true, cfg.envelope_scale / n0, 0.0},
        derive_seed(cfg.seed, 0, 0));
    rep.calibration_error = calibration(first, time_grid(rep.horizons.front(), cfg.time_samples));
    fit_loglog(rep);
    return rep;
}

SweepReport bilinear_sweep(const BilinearSweep& cfg) {
    if (cfg.ensemble < 1) throw std::invalid_argument("empty ensemble");
    if (!(cfg.width > 0.0) || !(cfg.crossings > 0.0)) {
        throw std::invalid_argument("band width and crossings must be positive");
    }
    const SpectralGrid grid(cfg.box_length, cfg.points);
    const double hw = 0.5 * cfg.width;

    struct Bands {
        double c1, c2;
    };
    std::vector<Bands> bands;
    SweepReport rep;
    rep.ensemble = cfg.ensemble;
    rep.seed = cfg.seed;
    if (cfg.mode == BilinearMode::separated) {
        rep.name = cfg.conjugate ? "bilinear-separated-conj" : "bilinear-separated";
        rep.parameter_name = "N";
        rep.parameters = cfg.levels;
        for (double n : cfg.levels) {
            const Bands b{0.0, 1.5 * n};
            // 2|xi1| <= |xi2| on the supports.
            if (2.0 * hw > b.c2 - hw) {
                throw std::invalid_argument("separated supports violate 2|xi1| <= |xi2|");
            }
            bands.push_back(b);
        }
    } else {
        rep.name = cfg.conjugate ? "bilinear-comparable-conj" : "bilinear-comparable";
        rep.parameter_name = "lambda";
        rep.parameters = cfg.separations;
        for (double lam : cfg.separations) {
            const Bands b{cfg.level - 0.5 * lam, cfg.level + 0.5 * lam};
            // dist(I1, I2) = lambda - width must stay comparable to lambda.
            if (lam - cfg.width < 0.5 * lam || b.c1 - hw <= 0.0) {
                throw std::invalid_argument("comparable supports need dist(I1, I2) >= lambda / 2");
            }
            bands.push_back(b);
        }
    }
    if (rep.parameters.empty()) throw std::invalid_argument("empty sweep");
    for (const auto& b : bands) {
        const double dv = 4.0 * std::abs(std::pow(b.c2, 3) - std::pow(b.c1, 3));
        rep.horizons.push_back(cfg.crossings * cfg.box_length / dv);
    }
    rep.ratios.assign(bands.size(), std::vector<double>(cfg.ensemble));

    const std::size_t jobs = bands.size() * cfg.ensemble;
    parallel_for(jobs, [&](std::size_t job) {
        const std::size_t pi = job / cfg.ensemble;
        const std::size_t si = job % cfg.ensemble;
        const auto& b = bands[pi];
        const BandPacket u = random_packet(
            grid, {b.c1 - hw, b.c1 + hw, false, cfg.envelope, 0.0}, derive_seed(cfg.seed, pi, 2 * si));
        const BandPacket v = random_packet(
            grid, {b.c2 - hw, b.c2 + hw, false, cfg.envelope, 0.0},
            derive_seed(cfg.seed, pi, 2 * si + 1));
        const auto times = time_grid(rep.horizons[pi], cfg.time_samples);
        std::vector<double> g(times.size());
        for (std::size_t i = 0; i < times.size(); ++i) {
            const auto a = evolve_baseband(u, times[i]);
            auto w = evolve_baseband(v, times[i]);
            // |u v| = |u conj(v)|; the conjugate variant differs only in phase.
            for (std::size_t j = 0; j < w.size(); ++j) {
                w[j] = cfg.conjugate ? a[j] * std::conj(w[j]) : a[j] * w[j];
            }
            g[i] = lq_samples(w, grid.spacing(), 2.0);
        }
        rep.ratios[pi][si] =
            time_norm(times, g, 2.0, times.back()) / (packet_l2(u) * packet_l2(v));
    });

    const BandPacket first =
        random_packet(grid, {bands[0].c1 - hw, bands[0].c1 + hw, false, cfg.envelope, 0.0},
                      derive_seed(cfg.seed, 0, 0));
    rep.calibration_error = calibration(first, time_grid(rep.horizons.front(), cfg.time_samples));
    fit_loglog(rep);
    return rep;
}

SweepReport l4_interval_sweep(const L4Sweep& cfg) {
    if (!(cfg.q >= 4.0)) throw std::invalid_argument("L4 sweep needs q >= 4");
    if (!(cfg.horizon > 0.0 && cfg.horizon < 1.0)) throw std::invalid_argument("need 0 < T < 1");
    if (cfg.ensemble < 1) throw std::invalid_argument("empty ensemble");

    struct Interval {
        double lo, hi;
    };
    std::vector<Interval> intervals;
    SweepReport rep;
    rep.name = "l4-interval";
    rep.ensemble = cfg.ensemble;
    rep.seed = cfg.seed;
    if (cfg.axis == IntervalSweepAxis::width) {
        rep.parameter_name = "width";
        rep.parameters = cfg.widths;
        for (double w : cfg.widths) intervals.push_back({cfg.offset, cfg.offset + w});
    } else {
        rep.parameter_name = "offset";
        rep.parameters = cfg.offsets;
        for (double o : cfg.offsets) intervals.push_back({o, o + cfg.width});
    }
    if (intervals.empty()) throw std::invalid_argument("empty sweep");
    for (const auto& iv : intervals) {
        if (iv.lo < 0.0 || iv.hi - iv.lo < 1.0) {
            throw std::invalid_argument("interval must lie in [0, inf) with |I| >= 1");
        }
        rep.horizons.push_back(cfg.horizon);
    }
    rep.ratios.assign(intervals.size(), std::vector<double>(cfg.ensemble));

    const std::size_t jobs = intervals.size() * cfg.ensemble;
    parallel_for(jobs, [&](std::size_t job) {
        const std::size_t pi = job / cfg.ensemble;
        const std::size_t si = job % cfg.ensemble;
        const auto& iv = intervals[pi];
        const double half = 0.5 * (iv.hi - iv.lo);
        // |u|^4 carries frequencies up to 4 half-widths; keep them below Nyquist.
        const std::size_t m = next_pow2(1.25 * (4.0 * half + 4.0) * cfg.box_length / kPi);
        const SpectralGrid grid(cfg.box_length, std::max<std::size_t>(m, 256));
        const BandPacket u = random_packet(grid, {iv.lo, iv.hi, false, cfg.envelope, 0.0},
                                           derive_seed(cfg.seed, pi, si));

        // Sample often enough for the fastest beat in ||u(t)||_4^4.
        const double v_spread = 4.0 * (std::pow(iv.hi + 1.0, 3) - std::pow(std::max(0.0, iv.lo - 1.0), 3));
        const double omega = v_spread * 4.0 * (half + 1.0);
        const auto samples = std::min<std::size_t>(
            std::max(cfg.time_samples, static_cast<std::size_t>(2.0 * cfg.horizon * omega / kPi)),
            std::size_t{1} << 15);
        const auto times = time_grid(cfg.horizon, samples);
        std::vector<double> g(times.size());
        for (std::size_t i = 0; i < times.size(); ++i) {
            g[i] = lq_samples(evolve_baseband(u, times[i]), grid.spacing(), 4.0);
        }
        const double lhs = time_norm(times, g, 4.0, cfg.horizon);

        // Box norms at integer lambda from the true frequencies.
        const double shift = grid.frequency_step() * static_cast<double>(u.carrier);
        const auto lo = static_cast<std::int64_t>(std::floor(iv.lo)) - 2;
        const auto hi = static_cast<std::int64_t>(std::ceil(iv.hi)) + 2;
        std::vector<double> box(static_cast<std::size_t>(hi - lo + 1), 0.0);
        const WindowFamily psi = WindowFamily::cosine_squared();
        const auto c = u.base.spectrum();
        for (std::size_t i = 0; i < c.size(); ++i) {
            const double a = std::norm(c[i]);
            if (a == 0.0) continue;
            const double xi = grid.frequency(i) + shift;
            const auto n0 = static_cast<std::int64_t>(std::floor(xi));
            for (std::int64_t n = n0; n <= n0 + 1; ++n) {
                if (n < lo || n > hi) continue;
                const double w = psi.shifted(xi, n);
                box[static_cast<std::size_t>(n - lo)] += w * w * a * grid.box_length();
            }
        }
        double proxy = 0.0;
        for (std::size_t k = 0; k < box.size(); ++k) {
            const double lam = static_cast<double>(lo + static_cast<std::int64_t>(k));
            const double term = std::sqrt(japanese(lam)) * std::sqrt(box[k]);
            proxy = std::isinf(cfg.q) ? std::max(proxy, term) : proxy + std::pow(term, cfg.q);
        }
        if (!std::isinf(cfg.q)) proxy = std::pow(proxy, 1.0 / cfg.q);

        const double len = iv.hi - iv.lo;
        const double iq = std::isinf(cfg.q) ? 0.0 : 1.0 / cfg.q;
        // <lambda>^{-3/4} is largest at the interval's left end.
        const double weight = cfg.drop_offset_weight ? 1.0 : std::pow(japanese(iv.lo), -0.75);
        const double rhs = std::pow(cfg.horizon, 0.25 * cfg.epsilon) *
                           std::pow(len, 0.25 - iq + cfg.epsilon) * weight * proxy;
        rep.ratios[pi][si] = rhs > 0.0 ? lhs / rhs : 0.0;
    });

    // Calibration on a narrow packet at the first interval.
    const SpectralGrid grid(cfg.box_length, 512);
    const BandPacket first = random_packet(
        grid, {intervals[0].lo, intervals[0].lo + 1.0, false, cfg.envelope, 0.0},
        derive_seed(cfg.seed, 0, 0));
    rep.calibration_error = calibration(first, time_grid(cfg.horizon, cfg.time_samples));
    fit_loglog(rep);
    return rep;
}

}  // namespace biharmonic
