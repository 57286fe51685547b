#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../oracles.hpp"
#include "biharmonic/dynamics.hpp"
#include "biharmonic/norms.hpp"

using namespace biharmonic;
constexpr double kPi = std::numbers::pi;

namespace {

// NaN-aware sup distance.
double sup_distance(const SpectralField& a, const SpectralField& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = std::abs(a.physical()[j] - b.physical()[j]);
        if (!(d <= m)) m = d;
    }
    return m;
}

double plane_wave_error(double dt, double T) {
    const auto g = make_grid(2 * kPi, 16);
    const Etdrk4Stepper stepper(g, dt);
    auto u = plane_wave_reference(g, 0.5, 2.0, 0.0);
    const long steps = std::lround(T / dt);
    for (long i = 0; i < steps; ++i) u = stepper.step(u);
    return sup_distance(u, plane_wave_reference(g, 0.5, 2.0, static_cast<double>(steps) * dt));
}

}  // namespace

TEST_CASE("plane-wave frequency") {
    for (double a : {0.1, 0.5, 1.3})
        for (double k : {-3.0, 0.0, 2.0}) CHECK(plane_wave_frequency(a, k) == doctest::Approx(oracle::plane_wave_omega(a, k)));
    Coefficients c;
    c.beta = 0.7;
    c.gamma = 2.0;
    c.weights = {1.5, 1, 2, 3, 4, 5};
    const double a = 0.4, k = 1.5;
    const double expect = 2.0 * std::pow(k, 4) - 0.7 * k * k + 1.5 * a * a + (4.0 - 1 - 2 - 3) * k * k * a * a + 5.0 * std::pow(a, 4);
    CHECK(plane_wave_frequency(a, k, c) == doctest::Approx(expect));
    CHECK(Coefficients{}.is_integrable());
    CHECK_FALSE(c.is_integrable());
}

TEST_CASE("plane-wave reference validation") {
    const auto g = make_grid(2 * kPi, 16);
    CHECK_THROWS_AS(plane_wave_reference(g, 0.5, 2.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(plane_wave_reference(g, 0.5, -8.0, 0.0), std::invalid_argument);
}

TEST_CASE("pseudospectral nonlinearity matches the pointwise oracle") {
    // Band |k| <= 6 keeps the quintic products alias-free on the padded grid.
    const double L = 2 * kPi;
    const std::int64_t N = 64, fine = 512;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss;
    oracle::Lattice lat{L, fine, std::vector<cplx>(static_cast<std::size_t>(fine))};
    for (std::int64_t k = -6; k <= 6; ++k) lat.c[static_cast<std::size_t>(k + fine / 2)] = 0.15 * cplx(gauss(rng), gauss(rng)) / (1.0 + std::abs(static_cast<double>(k)));
    const auto u = oracle::naive_synthesis(lat), ux = oracle::derivative(lat, 1), uxx = oracle::derivative(lat, 2);
    std::vector<cplx> f(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) f[j] = oracle::quintic(u[j], ux[j], uxx[j]);
    const auto ref = oracle::naive_dft(f, L);

    std::vector<cplx> coarse(static_cast<std::size_t>(N));
    for (std::int64_t k = -6; k <= 6; ++k) coarse[static_cast<std::size_t>(k < 0 ? k + N : k)] = lat.at(k);
    const auto field = synthesize(coarse, make_grid(L, static_cast<std::size_t>(N)));
    const auto got = nonlinearity(field);
    double scale = 0.0;
    for (std::int64_t k = -N / 2 + 1; k < N / 2; ++k) scale = std::max(scale, std::abs(ref.at(k)));
    for (std::int64_t k = -N / 2 + 1; k < N / 2; ++k) CHECK(std::abs(got.coefficient(k) - ref.at(k)) <= 1e-12 * scale);
    CHECK(got.coefficient(-N / 2) == cplx{});
}

TEST_CASE("linear-only flow is the free propagator") {
    const auto g = make_grid(16 * kPi, 128);
    const auto u = sample(g, oracle::bumps(3, 6.0, 2.0));
    PhysicsOptions linear;
    linear.nonlinear = false;
    const Etdrk4Stepper stepper(g, 1e-3, linear);
    auto v = u;
    for (int i = 0; i < 10; ++i) v = stepper.step(v);
    CHECK(sup_distance(v, free_evolve(u, 1e-2)) < 1e-13);
}

TEST_CASE("ETDRK4 is fourth order where truncation dominates") {
    // a = 0.5, k = 2 with steps large enough that the error is far above roundoff.
    const double e1 = plane_wave_error(1e-2, 1.0), e2 = plane_wave_error(5e-3, 1.0), e3 = plane_wave_error(2.5e-3, 1.0);
    const double order = (std::log2(e1 / e2) + std::log2(e2 / e3)) / 2.0;
    CHECK(order > 3.7);
    CHECK(order < 4.3);
}

TEST_CASE("plane wave stays on the exact solution at small steps") {
    CHECK(plane_wave_error(5e-5, 0.1) < 1e-8);
}

TEST_CASE("mass is conserved by the integrator") {
    SimulationConfig c;
    c.box_length = 16 * kPi;
    c.points = 256;
    c.dt = 1e-4;
    c.horizon = 0.05;
    c.record_every = 100;
    c.diagnostics.z_norm = false;
    const auto t = simulate(c);
    REQUIRE(t.times.size() == 6);
    for (const auto& d : t.diagnostics) CHECK(std::abs(d.mass - t.diagnostics.front().mass) <= 1e-12 * d.mass);
}

TEST_CASE("snapshots follow record_every and include the final time") {
    SimulationConfig c;
    c.box_length = 16 * kPi;
    c.points = 64;
    c.dt = 1e-3;
    c.horizon = 0.0105;
    c.record_every = 4;
    c.diagnostics.z_norm = false;
    const auto t = simulate(c);
    // 11 steps of 0.0105/11: snapshots after steps 0, 4, 8, 11.
    REQUIRE(t.times.size() == 4);
    CHECK(t.dt == doctest::Approx(0.0105 / 11));
    CHECK(t.times.back() == doctest::Approx(0.0105));
    CHECK(t.times[1] == doctest::Approx(4 * t.dt));
}

TEST_CASE("config validation and the line guard") {
    SimulationConfig c;
    c.box_length = 16 * kPi;
    c.points = 64;
    c.horizon = 0.01;
    c.dt = 0.0;
    CHECK_THROWS_AS(simulate(c), std::invalid_argument);
    c.dt = 1e-3;
    c.data.width = 20.0;  // far too wide for the box
    CHECK_THROWS_AS(simulate(c), std::invalid_argument);
    c.data = {};
    c.data.profile = "sawtooth";
    CHECK_THROWS_AS(simulate(c), std::invalid_argument);
}

TEST_CASE("blow-up guard") {
    SimulationConfig c;
    c.box_length = 16 * kPi;
    c.points = 128;
    c.data.amplitude = 3.0;
    c.dt = 1e-2;
    c.horizon = 1.0;
    c.record_every = 10;
    c.diagnostics.z_norm = false;
    CHECK_THROWS_AS(simulate(c), BlowUpError);
}

TEST_CASE("conservation report reuses recorded alpha") {
    SimulationConfig c;
    c.box_length = 16 * kPi;
    c.points = 512;  // coarser grids resolve alpha only to ~1e-6
    c.dt = 1e-4;
    c.horizon = 0.01;
    c.record_every = 50;
    c.diagnostics.z_norm = false;
    for (std::int64_t n = -1; n <= 1; ++n) c.diagnostics.kappas.push_back(SpectralParameter::lattice(1.0, n));
    const auto t = simulate(c);
    const auto reused = conservation_report(t, c.diagnostics.kappas);
    auto bare = t;
    bare.diagnostics.clear();
    const auto fresh = conservation_report(bare, c.diagnostics.kappas);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t s = 0; s < t.times.size(); ++s)
            CHECK(reused.series[i].alpha[s] == doctest::Approx(fresh.series[i].alpha[s]).epsilon(1e-12));
        CHECK(reused.series[i].drift < 1e-6);
        CHECK(reused.series[i].criterion_met);
    }
    CHECK(reused.mass_drift < 1e-12);
}

TEST_CASE("initial data profiles") {
    const auto g = make_grid(16 * kPi, 128);
    InitialData d;
    d.profile = "zero";
    CHECK(lebesgue_norm(make_initial_data(g, d), kInfinity) == 0.0);
    d.profile = "gaussian";
    d.amplitude = 0.5;
    CHECK(lebesgue_norm(make_initial_data(g, d), kInfinity) == doctest::Approx(0.5));
    d.profile = "packet";
    d.seed = 4;
    const auto p1 = make_initial_data(g, d), p2 = make_initial_data(g, d);
    CHECK(sup_distance(p1, p2) == 0.0);
    d.seed = 5;
    CHECK(sup_distance(p1, make_initial_data(g, d)) > 0.0);
}
