#include "biharmonic/determinant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "biharmonic/norms.hpp"
#include "biharmonic/parallel.hpp"

namespace biharmonic {
namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// Lattice data shared by the assemblies, in ascending wavenumber order.
struct Basis {
    Eigen::Index n = 0;
    std::int64_t half = 0;
    std::vector<cplx> coeff;  // coeff[m + half] = c_m, m in [-half, half); c_{-half} = 0
    VectorXcd d;              // 1 / (kappa - i xi)
    VectorXcd e;              // 1 / (kappa + i xi)

    cplx c(std::int64_t m) const {
        if (m <= -half || m >= half) return {};
        return coeff[static_cast<std::size_t>(m + half)];
    }
};

Basis make_basis(const SpectralField& field, const SpectralParameter& kappa) {
    const auto& grid = field.grid();
    Basis b;
    b.n = static_cast<Eigen::Index>(grid.size());
    b.half = static_cast<std::int64_t>(grid.size() / 2);
    b.coeff.resize(grid.size());
    b.d.resize(b.n);
    b.e.resize(b.n);
    const double step = grid.frequency_step();
    for (Eigen::Index i = 0; i < b.n; ++i) {
        const std::int64_t k = i - b.half;
        b.coeff[static_cast<std::size_t>(i)] = k == -b.half ? cplx{} : field.coefficient(k);
        const double xi = step * static_cast<double>(k);
        b.d[i] = 1.0 / (kappa.value() - cplx(0.0, xi));
        b.e[i] = 1.0 / (kappa.value() + cplx(0.0, xi));
    }
    return b;
}

// U[j, l] = c_{k_j - k_l}.
MatrixXcd multiplication_matrix(const Basis& b) {
    MatrixXcd u(b.n, b.n);
    for (Eigen::Index l = 0; l < b.n; ++l) {
        for (Eigen::Index j = 0; j < b.n; ++j) u(j, l) = b.c(j - l);
    }
    return u;
}

}  // namespace

SpectralParameter::SpectralParameter(double re, double im) : re_(re), im_(im) {
    if (!(re > 0.0) || !std::isfinite(re) || !std::isfinite(im)) {
        throw std::invalid_argument("spectral parameter needs Re kappa > 0");
    }
}

SpectralParameter SpectralParameter::lattice(double kappa0, std::int64_t n) {
    SpectralParameter k(kappa0, 0.5 * static_cast<double>(n));
    k.index_ = n;
    return k;
}

OperatorMatrix build_operator_matrix(const SpectralField& field, const SpectralParameter& kappa) {
    const Basis b = make_basis(field, kappa);
    const MatrixXcd u = multiplication_matrix(b);
    const VectorXcd dh = b.d.cwiseSqrt();  // principal branch; Re(kappa - i xi) > 0

    OperatorMatrix k;
    k.entries.noalias() = u * (b.e.asDiagonal() * u.adjoint());
    k.entries = dh.asDiagonal() * k.entries * dh.asDiagonal();
    k.hs_norm = hs_norm(k.entries);
    k.completion = first_trace_completion(field, kappa);
    return k;
}

MatrixXcd build_cyclic_matrix(const SpectralField& field, const SpectralParameter& kappa) {
    const Basis b = make_basis(field, kappa);
    const MatrixXcd u = multiplication_matrix(b);
    MatrixXcd right = b.d.asDiagonal() * u;
    MatrixXcd out(b.n, b.n);
    out.noalias() = u.adjoint() * right;
    return b.e.asDiagonal() * out;
}

MatrixXcd build_half_sandwich(const SpectralField& field, const SpectralParameter& kappa) {
    const Basis b = make_basis(field, kappa);
    const MatrixXcd u = multiplication_matrix(b);
    return b.d.cwiseSqrt().asDiagonal() * u * b.e.cwiseSqrt().asDiagonal();
}

double hs_norm(const MatrixXcd& m) { return m.norm(); }

std::vector<cplx> trace_powers(const MatrixXcd& m, int max_power) {
    if (max_power < 1) throw std::invalid_argument("trace power must be >= 1");
    std::vector<cplx> tr(static_cast<std::size_t>(max_power));

    // P1..P4 cost three products; tr(Pa Pb) is an O(N^2) contraction.
    const int products = std::min(max_power, 4);
    std::vector<MatrixXcd> p(5);
    p[1] = m;
    if (products >= 2) p[2].noalias() = m * m;
    if (products >= 3) p[3].noalias() = p[2] * m;
    if (products >= 4) p[4].noalias() = p[2] * p[2];
    auto contract = [&](int a, int b) { return p[a].cwiseProduct(p[b].transpose()).sum(); };
    for (int l = 1; l <= std::min(max_power, 8); ++l) {
        tr[static_cast<std::size_t>(l - 1)] = l <= 4 ? p[l].trace() : contract(4, l - 4);
    }
    if (max_power > 8) {
        const Eigen::ComplexEigenSolver<MatrixXcd> solver(m, false);
        if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalue solver failed");
        const VectorXcd lambda = solver.eigenvalues();
        for (int l = 9; l <= max_power; ++l) {
            cplx total{};
            for (Eigen::Index i = 0; i < lambda.size(); ++i) total += std::pow(lambda[i], l);
            tr[static_cast<std::size_t>(l - 1)] = total;
        }
    }
    return tr;
}

cplx trace_power(const MatrixXcd& m, int power, TracePath path) {
    if (power < 1) throw std::invalid_argument("trace power must be >= 1");
    if (path == TracePath::automatic) path = power <= 8 ? TracePath::power : TracePath::eigen;
    if (path == TracePath::eigen) {
        const Eigen::ComplexEigenSolver<MatrixXcd> solver(m, false);
        if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalue solver failed");
        cplx total{};
        for (const auto& lambda : solver.eigenvalues()) total += std::pow(lambda, power);
        return total;
    }
    // Binary powering.
    MatrixXcd result = MatrixXcd::Identity(m.rows(), m.cols());
    MatrixXcd base = m;
    bool first = true;
    for (int e = power; e > 0; e >>= 1) {
        if (e & 1) {
            if (first) {
                result = base;
                first = false;
            } else {
                result = (result * base).eval();
            }
        }
        if (e > 1) base = (base * base).eval();
    }
    return result.trace();
}

cplx digamma(cplx w) {
    if (w.imag() == 0.0 && w.real() <= 0.0 && w.real() == std::floor(w.real())) {
        throw std::domain_error("digamma pole");
    }
    // Recurrence up to Re w >= 20, then the asymptotic series.
    cplx shift{};
    while (w.real() < 20.0) {
        shift -= 1.0 / w;
        w += 1.0;
    }
    const cplx r = 1.0 / w;
    const cplx r2 = r * r;
    // Bernoulli terms B_{2k} / (2k) for k = 1..7.
    constexpr double b[] = {1.0 / 12.0,   -1.0 / 120.0,    1.0 / 252.0,  -1.0 / 240.0,
                            1.0 / 132.0, -691.0 / 32760.0, 1.0 / 12.0};
    cplx series{};
    cplx pw = r2;
    for (double coeff : b) {
        series += coeff * pw;
        pw *= r2;
    }
    return shift + std::log(w) - 0.5 * r - series;
}

// For fixed m the missing pairs are j > b_m and j < a_m with
//   f(j) = 1 / ((kappa - i alpha j)(kappa + i alpha (j - m))),  alpha = 2 pi / L.
// Partial fractions turn each one-sided sum into a digamma difference.
cplx first_trace_completion(const SpectralField& field, const SpectralParameter& kappa) {
    const auto& grid = field.grid();
    const double a = grid.frequency_step();
    const auto half = static_cast<std::int64_t>(grid.size() / 2);
    const cplx kap = kappa.value();
    const cplx i1(0.0, 1.0);
    const cplx z1 = i1 * kap / a;

    cplx total{};
    for (std::int64_t m = -half + 1; m <= half - 1; ++m) {
        const double w = std::norm(field.coefficient(m));
        if (w == 0.0) continue;
        const auto am = static_cast<double>(std::max(-half, -half + m));
        const auto bm = static_cast<double>(std::min(half - 1, half - 1 + m));
        const cplx z2 = -static_cast<double>(m) - i1 * kap / a;
        const cplx pref = (i1 / a) / (2.0 * kap - i1 * a * static_cast<double>(m));
        const cplx upper = digamma(bm + 1.0 + z2) - digamma(bm + 1.0 + z1);
        const cplx lower = digamma(1.0 - am - z1) - digamma(1.0 - am - z2);
        total += w * pref * (upper + lower);
    }
    return total;
}

namespace {

// 2 Im kappa as an integer number of lattice steps.
std::int64_t lattice_shift(const SpectralGrid& grid, const SpectralParameter& kappa) {
    const double steps = 2.0 * kappa.im() / grid.frequency_step();
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, std::abs(steps))) {
        throw std::invalid_argument("2 Im kappa = " + std::to_string(2.0 * kappa.im()) +
                                    " is not on the frequency lattice (need L in 2 pi N)");
    }
    return static_cast<std::int64_t>(rounded);
}

template <class Weight>
double shifted_quadrature(const SpectralField& field, const SpectralParameter& kappa, Weight w) {
    const auto& grid = field.grid();
    const std::int64_t shift = lattice_shift(grid, kappa);
    const auto half = static_cast<std::int64_t>(grid.size() / 2);
    const double step = grid.frequency_step();
    double total = 0.0;
    // xi_k + 2 Im kappa = xi_{k + shift}; c is zero off the lattice and at Nyquist.
    for (std::int64_t m = -half + 1; m <= half - 1; ++m) {
        const double c2 = std::norm(field.coefficient(m));
        if (c2 == 0.0) continue;
        total += c2 * w(step * static_cast<double>(m - shift));
    }
    return grid.box_length() * total;
}

}  // namespace

double leading_term_closed_form(const SpectralField& field, const SpectralParameter& kappa) {
    const double k0 = kappa.re();
    return shifted_quadrature(field, kappa, [k0](double xi) {
        return 2.0 * k0 / (4.0 * k0 * k0 + xi * xi);
    });
}

double hs_closed_form_proxy(const SpectralField& field, const SpectralParameter& kappa) {
    const double k0 = kappa.re();
    return shifted_quadrature(field, kappa, [k0](double xi) {
        return std::log(4.0 + xi * xi / (k0 * k0)) / std::sqrt(4.0 * k0 * k0 + xi * xi);
    });
}

AlphaResult alpha(const OperatorMatrix& k, const AlphaOptions& options) {
    if (options.max_power < 1) throw std::invalid_argument("series truncation must be >= 1");
    AlphaResult r;
    r.hs = k.hs_norm;
    r.max_power = options.max_power;
    r.converged = r.hs < 1.0;
    r.completion = options.complete_first_trace ? k.completion.real() : 0.0;
    r.tail_bound = r.converged ? std::pow(r.hs, options.max_power + 1) /
                                     ((options.max_power + 1) * (1.0 - r.hs))
                               : kInfinity;

    if (options.method == AlphaMethod::logdet) {
        r.max_power = 0;
        r.tail_bound = 0.0;
        if (k.dim() == 0 || r.hs == 0.0) {
            r.value = r.completion;
            return r;
        }
        const MatrixXcd a = MatrixXcd::Identity(k.dim(), k.dim()) - k.entries;
        const Eigen::PartialPivLU<MatrixXcd> lu(a);
        const MatrixXcd& packed = lu.matrixLU();
        double log_abs = 0.0;
        for (Eigen::Index i = 0; i < packed.rows(); ++i) {
            const double pivot = std::abs(packed(i, i));
            if (!(pivot > 1e-14)) throw std::domain_error("I - K is numerically singular");
            log_abs += std::log(pivot);
        }
        // Re log det = log |det|; the permutation sign only moves the phase.
        r.value = -log_abs + r.completion;
        return r;
    }

    if (r.hs == 0.0) {
        r.terms.assign(static_cast<std::size_t>(options.max_power), 0.0);
        r.terms[0] = r.completion;
        r.value = r.completion;
        return r;
    }
    const auto tr = trace_powers(k.entries, options.max_power);
    r.terms.resize(tr.size());
    for (std::size_t l = 0; l < tr.size(); ++l) {
        r.terms[l] = tr[l].real() / static_cast<double>(l + 1);
    }
    r.terms[0] += r.completion;
    for (double t : r.terms) r.value += t;
    return r;
}

AlphaResult alpha(const SpectralField& field, const SpectralParameter& kappa,
                  const AlphaOptions& options) {
    return alpha(build_operator_matrix(field, kappa), options);
}

Kappa0Choice choose_kappa0(const SpectralField& field, double s, double q, double delta,
                           std::int64_t n_lo, std::int64_t n_hi) {
    if (!(q >= 2.0)) throw std::invalid_argument("q must be >= 2");
    if (n_hi < n_lo) throw std::invalid_argument("empty lattice range");
    if (delta <= 0.0) delta = 1.0 / (8.0 * q);
    if (!(delta < 1.0 / (4.0 * q))) throw std::invalid_argument("delta must lie in (0, 1/(4q))");
    (void)s;

    Kappa0Choice choice;
    choice.delta = delta;
    const auto count = static_cast<std::size_t>(n_hi - n_lo + 1);
    std::vector<double> hs(count);
    for (double k0 = 1.0; k0 <= std::ldexp(1.0, 20); k0 *= 2.0) {
        parallel_for(count, [&](std::size_t i) {
            const auto n = n_lo + static_cast<std::int64_t>(i);
            hs[i] = build_operator_matrix(field, SpectralParameter::lattice(k0, n)).hs_norm;
        });
        const double worst = *std::max_element(hs.begin(), hs.end());
        choice.history.emplace_back(k0, worst);
        if (worst <= 0.5) {
            choice.kappa0 = k0;
            choice.max_hs = worst;
            return choice;
        }
    }
    throw std::runtime_error("kappa0 search exceeded 2^20; data too large for the box");
}

LatticeProfile alpha_lattice_profile(const SpectralField& field, double kappa0, double s, double q,
                                     double delta, std::int64_t n_lo, std::int64_t n_hi,
                                     bool both_paths) {
    if (!(kappa0 >= 1.0)) throw std::invalid_argument("kappa0 must be >= 1");
    if (!(q >= 2.0)) throw std::invalid_argument("q must be >= 2");
    if (n_hi < n_lo) throw std::invalid_argument("empty lattice range");
    if (delta <= 0.0) delta = 1.0 / (8.0 * q);

    LatticeProfile p;
    p.kappa0 = kappa0;
    p.s = s;
    p.q = q;
    p.delta = delta;
    p.rows.resize(static_cast<std::size_t>(n_hi - n_lo + 1));
    parallel_for(p.rows.size(), [&](std::size_t i) {
        LatticeRow& row = p.rows[i];
        row.n = n_lo + static_cast<std::int64_t>(i);
        const auto kappa = SpectralParameter::lattice(kappa0, row.n);
        const OperatorMatrix k = build_operator_matrix(field, kappa);
        const AlphaResult ld = alpha(k, {AlphaMethod::logdet});
        row.alpha = ld.value;
        row.hs = k.hs_norm;
        row.converged = k.hs_norm <= 0.5;
        row.alpha_series = std::numeric_limits<double>::quiet_NaN();
        if (both_paths) {
            const AlphaResult se = alpha(k, {AlphaMethod::series});
            row.alpha_series = se.value;
            row.tail_bound = se.tail_bound;
        }
        row.leading = leading_term_closed_form(field, kappa);
        row.residual = row.alpha - row.leading;
    });

    double res = 0.0;
    double lead = 0.0;
    for (const auto& row : p.rows) {
        const double w = std::sqrt(1.0 + static_cast<double>(row.n * row.n));
        res += std::pow(std::pow(w, 2.0 * s) * std::abs(row.residual), 0.5 * q);
        lead += std::pow(w, s * q) * std::pow(0.5 * kappa0 * row.leading, 0.5 * q);
    }
    p.residual_norm = std::pow(res, 2.0 / q);
    p.leading_z = std::pow(lead, 1.0 / q);
    p.comparison = std::pow(kappa0, -4.0 * delta) * std::pow(modulation_norm(field, s, q), 4.0);
    return p;
}

}  // namespace biharmonic
