#include <doctest.h>

#include <cmath>
#include <numbers>

#include "biharmonic/estimates.hpp"
#include "biharmonic/norms.hpp"

using namespace biharmonic;

TEST_CASE("admissibility per kind") {
    CHECK(is_admissible(kInfinity, 2.0, PairKind::strichartz));
    CHECK(is_admissible(kInfinity, 2.0, PairKind::biharmonic));
    CHECK(is_admissible(8.0, 4.0, PairKind::strichartz));
    CHECK_FALSE(is_admissible(8.0, 4.0, PairKind::biharmonic));
    CHECK(is_admissible(16.0, 4.0, PairKind::biharmonic));
    CHECK(is_admissible(8.0, kInfinity, PairKind::biharmonic));
    CHECK_FALSE(is_admissible(1.5, 2.0, PairKind::strichartz));
    CHECK(is_admissible(4.0, kInfinity, PairKind::strichartz));
}

TEST_CASE("random packets are deterministic and band-limited") {
    const auto g = make_grid(256.0, 1024);
    const PacketSpec spec{32.0, 48.0, false, 16.0, 0.0};
    const auto a = random_packet(g, spec, 7), b = random_packet(g, spec, 7), c = random_packet(g, spec, 8);
    CHECK(a.carrier == b.carrier);
    for (std::size_t i = 0; i < a.base.size(); ++i) CHECK(a.base.spectrum()[i] == b.base.spectrum()[i]);
    double diff = 0.0;
    for (std::size_t i = 0; i < a.base.size(); ++i) diff += std::abs(a.base.spectrum()[i] - c.base.spectrum()[i]);
    CHECK(diff > 0.0);
    const double step = g.frequency_step(), xc = static_cast<double>(a.carrier) * step;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double xi = xc + g.frequency(i);
        if (xi < spec.lo - 1e-12 || xi > spec.hi + 1e-12) CHECK(a.base.spectrum()[i] == cplx{});
    }
    CHECK(packet_l2(a) > 0.0);
}

TEST_CASE("baseband evolution is unitary") {
    const auto g = make_grid(256.0, 512);
    const auto p = random_packet(g, {60.0, 64.0, false, 16.0, 0.0}, 3);
    const auto v = evolve_baseband(p, 3.7e-3);
    double m = 0.0;
    for (const auto& x : v) m += std::norm(x);
    CHECK(std::sqrt(m * g.spacing()) == doctest::Approx(packet_l2(p)).epsilon(1e-12));
}

TEST_CASE("log-log fit recovers an exact power law") {
    SweepReport r;
    r.parameters = {2, 4, 8, 16};
    for (double x : r.parameters) r.ratios.push_back({3.0 * std::pow(x, -1.25), 3.0 * std::pow(x, -1.25)});
    fit_loglog(r);
    CHECK(r.slope == doctest::Approx(-1.25).epsilon(1e-12));
    CHECK(std::exp(r.intercept) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(r.slope_stderr < 1e-10);
    CHECK(r.means()[1] == doctest::Approx(3.0 * std::pow(4.0, -1.25)));
}

TEST_CASE("derived seeds differ") {
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(0, 0, 0) != derive_seed(1, 0, 0));
}

TEST_CASE("energy pair is exactly one") {
    StrichartzSweep s;
    s.p = kInfinity;
    s.q = 2.0;
    s.levels = {4, 16};
    s.ensemble = 2;
    const auto r = strichartz_sweep(s);
    for (const auto& row : r.ratios)
        for (double v : row) CHECK(std::abs(v - 1.0) < 1e-10);
    CHECK(r.calibration_error < 1e-12);
}

TEST_CASE("inadmissible pair is rejected") {
    StrichartzSweep s;
    s.kind = PairKind::biharmonic;
    CHECK_THROWS_AS(strichartz_sweep(s), std::invalid_argument);
    s.kind = PairKind::strichartz;
    s.p = 6.0;
    CHECK_THROWS_AS(strichartz_sweep(s), std::invalid_argument);
}

TEST_CASE("bilinear hypotheses are enforced") {
    BilinearSweep b;
    b.width = 64.0;  // supports overlap the separated band
    b.levels = {8};
    CHECK_THROWS_AS(bilinear_sweep(b), std::invalid_argument);
    BilinearSweep c;
    c.mode = BilinearMode::comparable;
    c.separations = {512.0};  // lambda beyond the level
    CHECK_THROWS_AS(bilinear_sweep(c), std::invalid_argument);
}

TEST_CASE("sweeps are reproducible from the seed") {
    BilinearSweep b;
    b.levels = {8, 16};
    b.ensemble = 2;
    b.seed = 42;
    const auto r1 = bilinear_sweep(b), r2 = bilinear_sweep(b);
    CHECK(r1.ratios == r2.ratios);
    b.seed = 43;
    CHECK(bilinear_sweep(b).ratios != r1.ratios);
}
