#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../oracles.hpp"
#include "biharmonic/norms.hpp"

using namespace biharmonic;
constexpr double kPi = std::numbers::pi;

namespace {

struct Case {
    SpectralField field;
    oracle::Lattice lat;
};

Case make_case(std::uint64_t seed, std::size_t N = 256, double L = 16 * kPi) {
    const auto f = oracle::bumps(seed, 8.0, 5.0);
    return {sample(make_grid(L, N), f), oracle::naive_dft(oracle::sample(L, static_cast<std::int64_t>(N), f), L)};
}

}  // namespace

TEST_CASE("Lebesgue norms") {
    const auto g = make_grid(30.0, 512);
    const auto u = sample(g, [](double x) { return cplx(std::exp(-x * x)); });
    CHECK(lebesgue_norm(u, 2.0) == doctest::Approx(std::pow(kPi / 2, 0.25)).epsilon(1e-12));
    CHECK(lebesgue_norm(u, 1.0) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-12));
    CHECK(lebesgue_norm(u, 4.0) == doctest::Approx(std::pow(kPi / 4, 0.125)).epsilon(1e-12));
    CHECK(lebesgue_norm(u, kInfinity) == doctest::Approx(1.0));
    CHECK_THROWS_AS(lebesgue_norm(u, 0.5), std::invalid_argument);
}

TEST_CASE("Sobolev and modulation norms match the oracle") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto c = make_case(seed);
        for (double s : {0.0, 0.4, 1.0}) {
            CHECK(sobolev_norm(c.field, s) == doctest::Approx(oracle::sobolev(c.lat, s)).epsilon(1e-12));
            for (double q : {2.0, 3.0, 4.0})
                CHECK(modulation_norm(c.field, s, q) == doctest::Approx(oracle::modulation(c.lat, s, q)).epsilon(1e-12));
        }
    }
}

TEST_CASE("L2 modulation norm lies between L2/sqrt(2) and L2") {
    // sum_n psi(xi - n)^2 is in [1/2, 1] for the cos^2 partition.
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto c = make_case(seed);
        const double r = modulation_norm(c.field, 0.0, 2.0) / lebesgue_norm(c.field, 2.0);
        CHECK(r >= 1.0 / std::sqrt(2.0) - 1e-12);
        CHECK(r <= 1.0 + 1e-12);
    }
}

TEST_CASE("Z profile matches the oracle and the tail bound is honest") {
    const auto c = make_case(4, 128);
    for (double k0 : {1.0, 4.0}) {
        const auto z = z_profile(c.field, k0);
        for (std::int64_t n : {-50, -3, 0, 2, 17, 400})
            CHECK(z.at(n) == doctest::Approx(oracle::z_inner(c.lat, k0, static_cast<double>(n))).epsilon(1e-12));
        const double s = 0.4, q = 4.0;
        const auto detail = z_norm_detail(z, s, q);
        // Truncated sum over a much wider range than n_max stays under value^q.
        double wide = 0.0;
        for (std::int64_t n = -40 * z.n_max; n <= 40 * z.n_max; ++n)
            wide += std::pow(1.0 + static_cast<double>(n * n), 0.5 * s * q) *
                    std::pow(oracle::z_inner(c.lat, k0, static_cast<double>(n)), 0.5 * q) * (std::abs(n) > z.n_max ? 1.0 : 0.0);
        CHECK(wide <= detail.tail * (1.0 + 1e-9));
        CHECK_THROWS_AS(z_norm_detail(z, 0.75, 4.0), std::invalid_argument);
    }
}

TEST_CASE("norm homogeneity and triangle inequality") {
    const auto a = make_case(5).field, b = make_case(6).field;
    const cplx lambda{-1.7, 0.4};
    const double m = std::abs(lambda);
    const auto la = scaled(a, lambda), ab = sum(a, b);
    auto check = [&](auto norm) {
        CHECK(std::abs(norm(la) - m * norm(a)) <= 1e-10 * m * norm(a));
        CHECK(norm(ab) <= norm(a) + norm(b) + 1e-10);
    };
    check([](const SpectralField& f) { return lebesgue_norm(f, 2.0); });
    check([](const SpectralField& f) { return lebesgue_norm(f, 3.0); });
    check([](const SpectralField& f) { return lebesgue_norm(f, kInfinity); });
    check([](const SpectralField& f) { return sobolev_norm(f, 0.5); });
    check([](const SpectralField& f) { return modulation_norm(f, 0.5, 4.0); });
    check([](const SpectralField& f) { return z_norm(f, {0.4, 4.0, 2.0}); });
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS((NormParams{0.0, 1.5, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((NormParams{0.0, 2.0, 0.5}.validate()), std::invalid_argument);
    CHECK_NOTHROW((NormParams{0.3, 4.0, 1.0}.validate()));
}

TEST_CASE("trapezoid time norm converges at second order") {
    // int_0^1 (1 + t^2)^2 dt = 1 + 2/3 + 1/5.
    const double exact = std::pow(1.0 + 2.0 / 3.0 + 0.2, 0.5);
    double prev = 0.0;
    for (int n : {16, 32, 64, 128}) {
        std::vector<double> t(static_cast<std::size_t>(n + 1)), v(t.size());
        for (int i = 0; i <= n; ++i) t[static_cast<std::size_t>(i)] = static_cast<double>(i) / n, v[static_cast<std::size_t>(i)] = 1.0 + t[static_cast<std::size_t>(i)] * t[static_cast<std::size_t>(i)];
        const double err = std::abs(time_norm(t, v, 2.0, 1.0) - exact);
        if (prev > 0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.02));
        prev = err;
    }
}

TEST_CASE("time norm edge cases") {
    const std::vector<double> t = {0.0, 0.5, 1.0}, v = {1.0, 3.0, 2.0};
    CHECK(time_norm(t, v, kInfinity, 1.0) == 3.0);
    CHECK(time_norm(t, v, 1.0, 0.75) == doctest::Approx(0.25 * (1 + 3) + 0.125 * (3 + 2.5)));
    CHECK_THROWS_AS(time_norm(t, v, 2.0, 1.5), std::invalid_argument);
    const std::vector<double> uneven = {0.0, 0.3, 1.0};
    CHECK_THROWS_AS(time_norm(uneven, v, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("scaling ratios stay bounded for a Gaussian") {
    const auto g = make_grid(64 * kPi, 2048);
    const auto u = sample(g, [](double x) { return cplx(std::exp(-x * x)); });
    for (double lambda : {0.125, 0.25, 0.5, 2.0, 4.0, 8.0}) {
        const auto r = scaling_check(u, lambda, {0.5, 4.0, 1.0});
        CHECK(r.ratio > 0.1);
        CHECK(r.ratio < 2.0);
    }
}
