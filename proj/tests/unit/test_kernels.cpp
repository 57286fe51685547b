#include <doctest.h>

#include <random>
#include <vector>

#include "biharmonic/kernels.hpp"

namespace k = biharmonic::kernels;
using biharmonic::cplx;

namespace {

std::vector<cplx> random_vec(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<cplx> v(n);
    for (auto& x : v) x = {g(rng), g(rng)};
    return v;
}

// FMA contraction changes the last bits, so compare with a few ulps of slack.
void close(const std::vector<cplx>& a, const std::vector<cplx>& b, double scale = 1.0) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-14 * scale * (1.0 + std::abs(b[i])));
}

const std::size_t kLengths[] = {0, 1, 2, 3, 5, 7, 8, 9, 15, 16, 17, 31, 33, 101, 1023};

}  // namespace

TEST_CASE("scalar table is always available") {
    CHECK(k::supported(k::Isa::scalar));
    CHECK(k::table(k::Isa::scalar).isa == k::Isa::scalar);
    CHECK(k::name(k::Isa::scalar) == "scalar");
}

TEST_CASE("unsupported ISA is rejected") {
    for (auto isa : {k::Isa::avx2, k::Isa::neon})
        if (!k::supported(isa)) CHECK_THROWS_AS(k::table(isa), std::invalid_argument);
}

TEST_CASE("SIMD variants match the scalar reference on odd lengths") {
    const auto& ref = k::table(k::Isa::scalar);
    for (auto isa : {k::Isa::avx2, k::Isa::neon}) {
        if (!k::supported(isa)) continue;
        const auto& t = k::table(isa);
        CAPTURE(k::name(isa));
        for (std::size_t n : kLengths) {
            CAPTURE(n);
            const auto a = random_vec(n, 1), b = random_vec(n, 2), x = random_vec(n, 3), y = random_vec(n, 4);

            auto m1 = a, m2 = a;
            ref.multiply(m1.data(), b.data(), n);
            t.multiply(m2.data(), b.data(), n);
            close(m2, m1);

            std::vector<cplx> c1(n), c2(n);
            ref.combine(c1.data(), a.data(), x.data(), b.data(), y.data(), n);
            t.combine(c2.data(), a.data(), x.data(), b.data(), y.data(), n);
            close(c2, c1, 4.0);

            auto s1 = y, s2 = y;
            ref.accumulate(s1.data(), a.data(), x.data(), n);
            t.accumulate(s2.data(), a.data(), x.data(), n);
            close(s2, s1, 4.0);

            const double n1 = ref.sum_norm(a.data(), n), n2 = t.sum_norm(a.data(), n);
            CHECK(std::abs(n1 - n2) <= 1e-13 * (1.0 + n1));

            std::vector<double> w(n);
            for (std::size_t i = 0; i < n; ++i) w[i] = 0.5 + static_cast<double>(i % 7);
            const double w1 = ref.weighted_sum_norm(a.data(), w.data(), n);
            const double w2 = t.weighted_sum_norm(a.data(), w.data(), n);
            CHECK(std::abs(w1 - w2) <= 1e-13 * (1.0 + w1));

            k::NonlinearWeights nw{0.7, 8, 2, 6, 4, 6};
            std::vector<cplx> f1(n), f2(n);
            ref.nonlinearity(f1.data(), a.data(), x.data(), y.data(), nw, n);
            t.nonlinearity(f2.data(), a.data(), x.data(), y.data(), nw, n);
            close(f2, f1, 64.0);
        }
    }
}

TEST_CASE("scalar nonlinearity matches the formula") {
    const auto& ref = k::table(k::Isa::scalar);
    const cplx u{0.3, -0.4}, ux{1.1, 0.2}, uxx{-0.5, 0.9};
    const k::NonlinearWeights w{0.5, 8, 2, 6, 4, 6};
    cplx out;
    ref.nonlinearity(&out, &u, &ux, &uxx, w, 1);
    const double m = std::norm(u);
    const cplx expect = 0.5 * u * m + 8.0 * uxx * m + 2.0 * std::conj(uxx) * u * u + 6.0 * ux * ux * std::conj(u) +
                        4.0 * u * std::norm(ux) + 6.0 * u * m * m;
    CHECK(std::abs(out - expect) < 1e-15);
}

TEST_CASE("select switches the active table") {
    const auto before = k::active().isa;
    k::select(k::Isa::scalar);
    CHECK(k::active().isa == k::Isa::scalar);
    k::select(before);
    CHECK(k::active().isa == before);
}
