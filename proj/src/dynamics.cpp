#include "biharmonic/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "biharmonic/norms.hpp"
#include "biharmonic/parallel.hpp"
#include "fft.hpp"

namespace biharmonic {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kContourPoints = 32;

// Pseudospectral evaluation of F on a padded grid. Holds scratch buffers, so
// one instance must not be shared between threads.
class NonlinearEvaluator {
public:
    NonlinearEvaluator(const SpectralGrid& grid, const PhysicsOptions& physics)
        : n_(grid.size()), m_(grid.size() * static_cast<std::size_t>(physics.padding)),
          weights_(physics.coefficients.weights) {
        if (physics.padding < 1 || physics.padding > 4) {
            throw std::invalid_argument("padding factor must be 1..4");
        }
        const SpectralGrid padded(grid.box_length(), m_);
        ik_.resize(m_);
        sign_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            ik_[i] = cplx(0.0, padded.frequency(i));
            sign_[i] = (padded.wavenumber(i) & 1) ? -1.0 : 1.0;
        }
        // Source index -> padded index for k in (-N/2, N/2).
        const auto half = static_cast<std::int64_t>(n_ / 2);
        for (std::int64_t k = -half + 1; k < half; ++k) {
            map_.emplace_back(*grid.index_of(k), *padded.index_of(k));
        }
        s_.resize(m_);
        sx_.resize(m_);
        sxx_.resize(m_);
        u_.resize(m_);
        ux_.resize(m_);
        uxx_.resize(m_);
        f_.resize(m_);
    }

    // out = F^(c), both in storage order of the unpadded grid.
    void operator()(const cplx* c, cplx* out) {
        std::fill(s_.begin(), s_.end(), cplx{});
        for (const auto& [src, dst] : map_) s_[dst] = sign_[dst] * c[src];
        for (std::size_t i = 0; i < m_; ++i) {
            sx_[i] = ik_[i] * s_[i];
            sxx_[i] = ik_[i] * sx_[i];
        }
        fft::backward(s_.data(), u_.data(), m_);
        fft::backward(sx_.data(), ux_.data(), m_);
        fft::backward(sxx_.data(), uxx_.data(), m_);
        kernels::active().nonlinearity(f_.data(), u_.data(), ux_.data(), uxx_.data(), weights_,
                                       m_);
        fft::forward(f_.data(), s_.data(), m_);
        const double inv = 1.0 / static_cast<double>(m_);
        std::fill(out, out + n_, cplx{});
        for (const auto& [src, dst] : map_) out[src] = sign_[dst] * inv * s_[dst];
    }

private:
    std::size_t n_;
    std::size_t m_;
    kernels::NonlinearWeights weights_;
    std::vector<cplx> ik_;
    std::vector<double> sign_;
    std::vector<std::pair<std::size_t, std::size_t>> map_;
    std::vector<cplx> s_, sx_, sxx_, u_, ux_, uxx_, f_;
};

std::vector<cplx> linear_symbol(const SpectralGrid& grid, const Coefficients& c) {
    std::vector<cplx> lam(grid.size());
    for (std::size_t i = 0; i < lam.size(); ++i) {
        const double xi2 = grid.frequency(i) * grid.frequency(i);
        lam[i] = cplx(0.0, c.gamma * xi2 * xi2 - c.beta * xi2);
    }
    return lam;
}

}  // namespace

bool Coefficients::is_integrable() const {
    const kernels::NonlinearWeights ref;
    return beta == 0.0 && gamma == 1.0 && weights.a1 == ref.a1 && weights.a2 == ref.a2 &&
           weights.a3 == ref.a3 && weights.a4 == ref.a4 && weights.a5 == ref.a5 &&
           weights.a6 == ref.a6;
}

SpectralField nonlinearity(const SpectralField& field, const PhysicsOptions& physics) {
    NonlinearEvaluator eval(field.grid(), physics);
    std::vector<cplx> out(field.size());
    eval(field.spectrum().data(), out.data());
    return synthesize(std::move(out), field.grid());
}

double plane_wave_frequency(double amplitude, double k, const Coefficients& c) {
    const double a2 = amplitude * amplitude;
    const double k2 = k * k;
    const auto& w = c.weights;
    return c.gamma * k2 * k2 - c.beta * k2 + w.a1 * a2 + (w.a5 - w.a2 - w.a3 - w.a4) * k2 * a2 +
           w.a6 * a2 * a2;
}

SpectralField plane_wave_reference(const SpectralGrid& grid, double amplitude, double k, double t,
                                   const Coefficients& c) {
    const double steps = k / grid.frequency_step();
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, std::abs(steps)) ||
        !grid.index_of(static_cast<std::int64_t>(rounded)) ||
        static_cast<std::int64_t>(rounded) == -static_cast<std::int64_t>(grid.size() / 2)) {
        throw std::invalid_argument("plane-wave wavenumber is not a resolved lattice frequency");
    }
    const double omega = plane_wave_frequency(amplitude, k, c);
    return sample(grid, [&](double x) { return std::polar(amplitude, k * x + omega * t); });
}

struct Etdrk4Stepper::Impl {
    SpectralGrid grid;
    double dt;
    PhysicsOptions physics;
    std::vector<cplx> e, e2;         // e^{z}, e^{z/2}
    std::vector<cplx> q, f1, f2, f3;  // phi-combinations, pre-multiplied by i (F enters as iF)
    mutable NonlinearEvaluator eval;
    mutable std::vector<cplx> nv, na, nb, nc, a, b, c, tmp;

    Impl(const SpectralGrid& g, double h, PhysicsOptions p)
        : grid(g), dt(h), physics(p), eval(g, p) {
        const std::size_t n = g.size();
        const auto lam = linear_symbol(g, p.coefficients);
        e.resize(n);
        e2.resize(n);
        q.resize(n);
        f1.resize(n);
        f2.resize(n);
        f3.resize(n);
        const cplx i1(0.0, 1.0);
        for (std::size_t k = 0; k < n; ++k) {
            const cplx z0 = dt * lam[k];
            e[k] = std::exp(z0);
            e2[k] = std::exp(0.5 * z0);
            cplx sq{}, s1{}, s2{}, s3{};
            for (int j = 0; j < kContourPoints; ++j) {
                const double theta = 2.0 * kPi * (j + 0.5) / kContourPoints;
                const cplx z = z0 + std::polar(1.0, theta);
                const cplx ez = std::exp(z);
                const cplx z3 = z * z * z;
                sq += (std::exp(0.5 * z) - 1.0) / z;
                s1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
                s2 += (2.0 + z + ez * (z - 2.0)) / z3;
                s3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
            }
            const double scale = dt / kContourPoints;
            q[k] = i1 * scale * sq;
            f1[k] = i1 * scale * s1;
            f2[k] = 2.0 * i1 * scale * s2;
            f3[k] = i1 * scale * s3;
        }
        for (auto* v : {&nv, &na, &nb, &nc, &a, &b, &c, &tmp}) v->resize(n);
    }

    void advance(std::vector<cplx>& v) const {
        if (!physics.nonlinear) {
            kernels::multiply(v, e);
            return;
        }
        eval(v.data(), nv.data());
        kernels::combine(a, e2, v, q, nv);
        eval(a.data(), na.data());
        kernels::combine(b, e2, v, q, na);
        eval(b.data(), nb.data());
        for (std::size_t k = 0; k < v.size(); ++k) tmp[k] = 2.0 * nb[k] - nv[k];
        kernels::combine(c, e2, a, q, tmp);
        eval(c.data(), nc.data());
        for (std::size_t k = 0; k < v.size(); ++k) tmp[k] = na[k] + nb[k];
        kernels::combine(a, e, v, f1, nv);
        kernels::accumulate(a, f2, tmp);
        kernels::accumulate(a, f3, nc);
        v.swap(a);
    }
};

Etdrk4Stepper::Etdrk4Stepper(const SpectralGrid& grid, double dt, PhysicsOptions physics) {
    if (!std::isfinite(dt) || dt == 0.0) throw std::invalid_argument("time step must be nonzero");
    impl_ = std::make_unique<Impl>(grid, dt, physics);
}

Etdrk4Stepper::~Etdrk4Stepper() = default;
Etdrk4Stepper::Etdrk4Stepper(Etdrk4Stepper&&) noexcept = default;
Etdrk4Stepper& Etdrk4Stepper::operator=(Etdrk4Stepper&&) noexcept = default;

double Etdrk4Stepper::dt() const noexcept { return impl_->dt; }
const SpectralGrid& Etdrk4Stepper::grid() const noexcept { return impl_->grid; }

void Etdrk4Stepper::advance(std::vector<cplx>& spectrum) const {
    if (spectrum.size() != impl_->grid.size()) {
        throw std::invalid_argument("spectrum length does not match the stepper grid");
    }
    impl_->advance(spectrum);
}

SpectralField Etdrk4Stepper::step(const SpectralField& field) const {
    if (!(field.grid() == impl_->grid)) throw std::invalid_argument("field is on another grid");
    std::vector<cplx> c(field.spectrum().begin(), field.spectrum().end());
    if (impl_->physics.nonlinear) c[impl_->grid.nyquist_index()] = 0.0;
    impl_->advance(c);
    return synthesize(std::move(c), impl_->grid);
}

SpectralField step(const SpectralField& field, double dt, const PhysicsOptions& physics) {
    return Etdrk4Stepper(field.grid(), dt, physics).step(field);
}

SpectralField make_initial_data(const SpectralGrid& grid, const InitialData& d) {
    const auto& p = d.profile;
    if (p == "zero") return zero_field(grid);
    if (p == "gaussian") {
        if (!(d.width > 0.0)) throw std::invalid_argument("gaussian width must be positive");
        return sample(grid, [&](double x) {
            const double y = (x - d.center) / d.width;
            return std::polar(d.amplitude * std::exp(-y * y), d.wavenumber * x);
        });
    }
    if (p == "plane_wave") return plane_wave_reference(grid, d.amplitude, d.wavenumber, 0.0);
    if (p == "packet") {
        if (!(d.width > 0.0) || !(d.band >= 0.0)) {
            throw std::invalid_argument("packet needs width > 0 and band >= 0");
        }
        std::mt19937_64 rng(d.seed);
        std::uniform_real_distribution<double> mag(0.5, 1.0);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
        std::vector<cplx> c(grid.size());
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (i == grid.nyquist_index() || std::abs(grid.frequency(i)) > d.band) continue;
            const double r = mag(rng);
            c[i] = std::polar(r, phase(rng));
        }
        const SpectralField carrier = synthesize(std::move(c), grid);
        std::vector<cplx> u(carrier.physical().begin(), carrier.physical().end());
        double peak = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j) {
            const double y = (grid.position(j) - d.center) / d.width;
            u[j] *= std::exp(-y * y);
            peak = std::max(peak, std::abs(u[j]));
        }
        if (peak > 0.0) {
            for (auto& v : u) v *= d.amplitude / peak;
        }
        return analyze(std::move(u), grid);
    }
    throw std::invalid_argument("unknown initial profile '" + p + "'");
}

double outer_mass_fraction(const SpectralField& field) {
    const auto& grid = field.grid();
    double outer = 0.0;
    double total = 0.0;
    for (std::size_t j = 0; j < field.size(); ++j) {
        const double a = std::norm(field.physical()[j]);
        total += a;
        if (std::abs(grid.position(j)) > 0.25 * grid.box_length()) outer += a;
    }
    return total > 0.0 ? outer / total : 0.0;
}

Diagnostics diagnose(const SpectralField& field, const DiagnosticsOptions& options) {
    Diagnostics d;
    d.mass = field.grid().box_length() * kernels::sum_norm(field.spectrum());
    d.sobolev = sobolev_norm(field, options.s);
    d.modulation = modulation_norm(field, options.s, options.q);
    d.z = std::numeric_limits<double>::quiet_NaN();
    if (options.z_norm && options.s >= 0.0 && options.s < 1.0 - 1.0 / options.q) {
        d.z = z_norm(field, {options.s, options.q, options.z_kappa0});
    }
    if (!options.kappas.empty()) {
        const SpectralField det_field = field.size() > options.determinant_points
                                            ? resample(field, options.determinant_points)
                                            : field;
        d.alpha.resize(options.kappas.size());
        d.hs.resize(options.kappas.size());
        parallel_for(options.kappas.size(), [&](std::size_t i) {
            const OperatorMatrix k = build_operator_matrix(det_field, options.kappas[i]);
            d.hs[i] = k.hs_norm;
            d.alpha[i] = alpha(k, {AlphaMethod::logdet}).value;
        });
    }
    return d;
}

void SimulationConfig::validate() const {
    SpectralGrid(box_length, points);
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
    if (!(horizon >= dt)) throw std::invalid_argument("horizon must be at least dt");
    if (record_every < 1) throw std::invalid_argument("record_every must be >= 1");
}

Trajectory simulate(const SimulationConfig& config) {
    config.validate();
    const SpectralGrid grid(config.box_length, config.points);
    return simulate(make_initial_data(grid, config.data), config);
}

Trajectory simulate(const SpectralField& initial, const SimulationConfig& config) {
    config.validate();
    const SpectralGrid& grid = initial.grid();
    if (config.line_guard && outer_mass_fraction(initial) > 1e-12) {
        throw std::invalid_argument("initial data has mass fraction " +
                                    std::to_string(outer_mass_fraction(initial)) +
                                    " outside the central half of the box");
    }

    const auto steps = static_cast<std::size_t>(std::ceil(config.horizon / config.dt - 1e-9));
    const double h = config.horizon / static_cast<double>(steps);
    const Etdrk4Stepper stepper(grid, h, config.physics);

    Trajectory traj;
    traj.dt = h;
    traj.kappas = config.diagnostics.kappas;
    std::vector<cplx> c(initial.spectrum().begin(), initial.spectrum().end());
    if (config.physics.nonlinear) c[grid.nyquist_index()] = 0.0;

    auto record = [&](double t) {
        traj.times.push_back(t);
        traj.fields.push_back(synthesize(c, grid));
        traj.diagnostics.push_back(diagnose(traj.fields.back(), config.diagnostics));
    };
    record(0.0);
    const double sup0 = lebesgue_norm(traj.fields.front(), kInfinity);

    for (std::size_t s = 1; s <= steps; ++s) {
        stepper.advance(c);
        const double t = h * static_cast<double>(s);
        const bool snapshot = s % config.record_every == 0 || s == steps;
        bool finite = true;
        for (const auto& v : c) finite = finite && std::isfinite(v.real()) && std::isfinite(v.imag());
        if (!finite) throw BlowUpError("solution became non-finite at t = " + std::to_string(t), t);
        if (snapshot || s % 16 == 0) {
            const SpectralField now = synthesize(c, grid);
            const double sup = lebesgue_norm(now, kInfinity);
            if (sup0 > 0.0 && sup > 1e6 * sup0) {
                throw BlowUpError("sup norm grew by more than 1e6 at t = " + std::to_string(t), t);
            }
        }
        if (snapshot) record(t);
    }
    return traj;
}

ConservationReport conservation_report(const Trajectory& trajectory,
                                       const std::vector<SpectralParameter>& kappas, double floor) {
    if (trajectory.fields.empty()) throw std::invalid_argument("empty trajectory");
    ConservationReport r;
    r.times = trajectory.times;
    const std::size_t snaps = trajectory.fields.size();

    // Reuse alpha values recorded by simulate when they cover the same kappas.
    bool reuse = trajectory.kappas.size() == kappas.size() && trajectory.diagnostics.size() == snaps;
    for (std::size_t i = 0; reuse && i < kappas.size(); ++i) {
        reuse = trajectory.kappas[i].re() == kappas[i].re() &&
                trajectory.kappas[i].im() == kappas[i].im();
    }
    for (const auto& d : trajectory.diagnostics) reuse = reuse && d.alpha.size() == kappas.size();

    for (const auto& k : kappas) r.series.push_back({k, std::vector<double>(snaps), std::vector<double>(snaps)});
    if (reuse) {
        for (std::size_t t = 0; t < snaps; ++t) {
            for (std::size_t i = 0; i < kappas.size(); ++i) {
                r.series[i].alpha[t] = trajectory.diagnostics[t].alpha[i];
                r.series[i].hs[t] = trajectory.diagnostics[t].hs[i];
            }
        }
    } else {
        const std::size_t nk = kappas.size();
        parallel_for(snaps * nk, [&](std::size_t job) {
            const std::size_t t = job / nk;
            const std::size_t i = job % nk;
            SpectralField f = trajectory.fields[t];
            if (f.size() > 1024) f = resample(f, 1024);
            const OperatorMatrix k = build_operator_matrix(f, kappas[i]);
            r.series[i].hs[t] = k.hs_norm;
            r.series[i].alpha[t] = alpha(k, {AlphaMethod::logdet}).value;
        });
    }
    for (auto& s : r.series) {
        const double a0 = s.alpha.front();
        for (std::size_t t = 0; t < snaps; ++t) {
            s.drift = std::max(s.drift, std::abs(s.alpha[t] - a0) / std::max(std::abs(a0), floor));
            s.criterion_met = s.criterion_met && s.hs[t] <= 0.5;
        }
        r.all_criteria_met = r.all_criteria_met && s.criterion_met;
    }

    for (std::size_t t = 0; t < snaps; ++t) {
        const auto& f = trajectory.fields[t];
        if (t < trajectory.diagnostics.size()) {
            r.mass.push_back(trajectory.diagnostics[t].mass);
            r.modulation.push_back(trajectory.diagnostics[t].modulation);
            r.z.push_back(trajectory.diagnostics[t].z);
        } else {
            r.mass.push_back(f.grid().box_length() * kernels::sum_norm(f.spectrum()));
            r.modulation.push_back(modulation_norm(f, 0.5, 4.0));
            r.z.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    const double m0 = r.mass.front();
    for (double m : r.mass) {
        r.mass_drift = std::max(r.mass_drift, std::abs(m - m0) / std::max(std::abs(m0), floor));
    }
    return r;
}

}  // namespace biharmonic
