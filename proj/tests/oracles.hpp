// Independent reference computations for the tests. Everything here is
// deliberately naive (O(N^2) DFTs, explicit loops, textbook formulas) and
// shares no code with the library beyond the std::complex type.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

// Coefficients c_k for k in [-N/2, N/2), stored at c[k + N/2].
struct Lattice {
    double L = 0.0;
    std::int64_t N = 0;
    std::vector<cplx> c;

    double xi(std::int64_t k) const { return 2.0 * pi * static_cast<double>(k) / L; }
    cplx at(std::int64_t k) const {
        if (k < -N / 2 || k >= N / 2) return {};
        return c[static_cast<std::size_t>(k + N / 2)];
    }
    double x(std::int64_t j) const { return -0.5 * L + L * static_cast<double>(j) / static_cast<double>(N); }
};

inline Lattice naive_dft(const std::vector<cplx>& u, double L) {
    Lattice lat{L, static_cast<std::int64_t>(u.size()), std::vector<cplx>(u.size())};
    for (std::int64_t k = -lat.N / 2; k < lat.N / 2; ++k) {
        cplx s{};
        for (std::int64_t j = 0; j < lat.N; ++j) s += u[static_cast<std::size_t>(j)] * std::polar(1.0, -lat.xi(k) * lat.x(j));
        lat.c[static_cast<std::size_t>(k + lat.N / 2)] = s / static_cast<double>(lat.N);
    }
    return lat;
}

inline std::vector<cplx> naive_synthesis(const Lattice& lat) {
    std::vector<cplx> u(static_cast<std::size_t>(lat.N));
    for (std::int64_t j = 0; j < lat.N; ++j) {
        cplx s{};
        for (std::int64_t k = -lat.N / 2; k < lat.N / 2; ++k) s += lat.at(k) * std::polar(1.0, lat.xi(k) * lat.x(j));
        u[static_cast<std::size_t>(j)] = s;
    }
    return u;
}

inline std::vector<cplx> sample(double L, std::int64_t N, const std::function<cplx(double)>& f) {
    std::vector<cplx> u(static_cast<std::size_t>(N));
    for (std::int64_t j = 0; j < N; ++j) u[static_cast<std::size_t>(j)] = f(-0.5 * L + L * static_cast<double>(j) / static_cast<double>(N));
    return u;
}

// Spectral derivative of order m with the Nyquist mode dropped.
inline std::vector<cplx> derivative(const Lattice& lat, int m) {
    Lattice d = lat;
    for (std::int64_t k = -lat.N / 2; k < lat.N / 2; ++k) {
        cplx& v = d.c[static_cast<std::size_t>(k + lat.N / 2)];
        v = k == -lat.N / 2 ? cplx{} : v * std::pow(cplx(0.0, lat.xi(k)), m);
    }
    return naive_synthesis(d);
}

// Random smooth field: a few Gaussian bumps with carriers.
inline std::function<cplx(double)> bumps(std::uint64_t seed, double spread = 8.0, double carrier = 6.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    struct B { double a, x0, w, k, ph; };
    std::vector<B> bs(1 + rng() % 4);
    for (auto& b : bs) b = {0.1 + 0.4 * U(rng), (U(rng) - 0.5) * spread, 0.6 + 1.4 * U(rng), (U(rng) - 0.5) * 2.0 * carrier, 2.0 * pi * U(rng)};
    return [bs](double x) {
        cplx s{};
        for (const auto& b : bs) {
            const double y = (x - b.x0) / b.w;
            s += b.a * std::exp(-y * y) * std::polar(1.0, b.k * x + b.ph);
        }
        return s;
    };
}

// Torus version of the leading-term integral
//   int 2 Re(kappa) |u^(xi + 2 Im kappa)|^2 / (4 Re(kappa)^2 + xi^2) dxi
// = L sum_k |c_k|^2 2 Re(kappa) / (4 Re(kappa)^2 + (xi_k - 2 Im kappa)^2).
inline double leading_quadrature(const Lattice& lat, cplx kappa) {
    double s = 0.0;
    for (std::int64_t k = -lat.N / 2; k < lat.N / 2; ++k) {
        const double d = lat.xi(k) - 2.0 * kappa.imag();
        s += lat.L * std::norm(lat.at(k)) * 2.0 * kappa.real() / (4.0 * kappa.real() * kappa.real() + d * d);
    }
    return s;
}

// K_{jl} = (kappa - i xi_j)^{-1/2} sum_m c_{j-m} (kappa + i xi_m)^{-1} conj(c_{l-m}) (kappa - i xi_l)^{-1/2}
// on modes k in [-N/2, N/2) with the Nyquist coefficient dropped, by triple loop.
inline Eigen::MatrixXcd dense_k(const Lattice& lat, cplx kappa) {
    const std::int64_t N = lat.N, h = N / 2;
    auto c = [&](std::int64_t m) { return (m <= -h || m >= h) ? cplx{} : lat.at(m); };
    Eigen::MatrixXcd K(N, N);
    for (std::int64_t j = 0; j < N; ++j)
        for (std::int64_t l = 0; l < N; ++l) {
            cplx s{};
            for (std::int64_t m = 0; m < N; ++m) s += c(j - m) / (kappa + cplx(0.0, lat.xi(m - h))) * std::conj(c(l - m));
            K(j, l) = s / std::sqrt(kappa - cplx(0.0, lat.xi(j - h))) / std::sqrt(kappa - cplx(0.0, lat.xi(l - h)));
        }
    return K;
}

// -Re log det(I - K) from the eigenvalues of K.
inline double alpha_eigen(const Eigen::MatrixXcd& K) {
    const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(K, false);
    double s = 0.0;
    for (const auto& l : es.eigenvalues()) s -= std::log(std::abs(1.0 - l));
    return s;
}

inline double window(double xi) {
    if (std::abs(xi) >= 1.0) return 0.0;
    const double c = std::cos(0.5 * pi * xi);
    return c * c;
}

inline double box_l2(const Lattice& lat, std::int64_t n) {
    double s = 0.0;
    for (std::int64_t k = -lat.N / 2; k < lat.N / 2; ++k) {
        const double w = window(lat.xi(k) - static_cast<double>(n));
        s += w * w * std::norm(lat.at(k));
    }
    return std::sqrt(lat.L * s);
}

inline double modulation(const Lattice& lat, double s, double q) {
    const auto top = static_cast<std::int64_t>(std::ceil(lat.xi(lat.N / 2))) + 2;
    double total = 0.0;
    for (std::int64_t n = -top; n <= top; ++n)
        total += std::pow(1.0 + static_cast<double>(n * n), 0.5 * s * q) * std::pow(box_l2(lat, n), q);
    return std::pow(total, 1.0 / q);
}

inline double sobolev(const Lattice& lat, double s) {
    double total = 0.0;
    for (std::int64_t k = -lat.N / 2; k < lat.N / 2; ++k) total += std::pow(1.0 + lat.xi(k) * lat.xi(k), s) * std::norm(lat.at(k));
    return std::sqrt(lat.L * total);
}

// I(n) = kappa0^2 L sum_k |c_k|^2 / (4 kappa0^2 + (xi_k - n)^2).
inline double z_inner(const Lattice& lat, double kappa0, double n) {
    double s = 0.0;
    for (std::int64_t k = -lat.N / 2; k < lat.N / 2; ++k) {
        const double d = lat.xi(k) - n;
        s += lat.L * std::norm(lat.at(k)) / (4.0 * kappa0 * kappa0 + d * d);
    }
    return kappa0 * kappa0 * s;
}

// u = a e^{i(kx + omega t)} solves u_t = i(u_xxxx + F) with omega collected
// term by term (each entry is F / u):
//   8 u_xx|u|^2 -> -8 k^2 a^2,  2 conj(u_xx) u^2 -> -2 k^2 a^2,
//   6 u_x^2 conj(u) -> -6 k^2 a^2,  4 u|u_x|^2 -> +4 k^2 a^2,  6 u|u|^4 -> 6 a^4.
inline double plane_wave_omega(double a, double k) {
    return k * k * k * k + (-8.0 - 2.0 - 6.0 + 4.0) * k * k * a * a + 6.0 * a * a * a * a;
}

// F for the integrable weights, pointwise from u and its derivatives.
inline cplx quintic(cplx u, cplx ux, cplx uxx) {
    const double m = std::norm(u);
    return 8.0 * uxx * m + 2.0 * std::conj(uxx) * u * u + 6.0 * ux * ux * std::conj(u) + 4.0 * u * std::norm(ux) + 6.0 * u * m * m;
}

}  // namespace oracle
