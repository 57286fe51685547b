// The perturbation determinant alpha(kappa; u) on a truncated Fourier basis.
//
//   K = (kappa - d_x)^{-1/2} u (kappa + d_x)^{-1} conj(u) (kappa - d_x)^{-1/2}
//   alpha = Re sum_l tr(K^l) / l = -Re log det(I - K)
//
// Matrices are indexed by ascending wavenumber k = -N/2 .. N/2-1, so row i is
// the mode k = i - N/2 (this differs from the FFT storage order of fields).
//
// The truncated first trace misses a slowly decaying tail: the diagonal of K
// falls off like 1/xi^2 only, which at desk-scale N is a relative error of a
// few percent. first_trace_completion() sums that tail exactly (digamma
// series) and alpha() adds it by default. Higher traces converge like 1/N^3
// and are left as they are.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

#include "biharmonic/spectral.hpp"

namespace biharmonic {

class SpectralParameter {
public:
    // Throws std::invalid_argument unless re > 0.
    SpectralParameter(double re, double im = 0.0);
    // kappa_n = kappa0 + i n / 2.
    static SpectralParameter lattice(double kappa0, std::int64_t n);

    double re() const noexcept { return re_; }
    double im() const noexcept { return im_; }
    cplx value() const noexcept { return {re_, im_}; }
    std::optional<std::int64_t> lattice_index() const noexcept { return index_; }

private:
    double re_;
    double im_;
    std::optional<std::int64_t> index_;
};

struct OperatorMatrix {
    Eigen::MatrixXcd entries;
    double hs_norm = 0.0;
    // Exact value of tr(K_infinite) - tr(K) for the band-limited field; see
    // first_trace_completion().
    cplx completion{};

    Eigen::Index dim() const { return entries.rows(); }
};

// Both assemblies drop the Nyquist coefficient of the field first.
OperatorMatrix build_operator_matrix(const SpectralField& field, const SpectralParameter& kappa);
// E conj(U) D U: same nonzero traces of every power as K.
Eigen::MatrixXcd build_cyclic_matrix(const SpectralField& field, const SpectralParameter& kappa);
// H = D^{1/2} U E^{1/2}; K = H E^{1/2} U^* D^{1/2}. Its HS norm is what the closed-form proxy tracks.
Eigen::MatrixXcd build_half_sandwich(const SpectralField& field, const SpectralParameter& kappa);

double hs_norm(const Eigen::MatrixXcd& m);

enum class TracePath { automatic, power, eigen };
// tr(M^l), l >= 1. automatic uses products for l <= 8 and eigenvalues above.
cplx trace_power(const Eigen::MatrixXcd& m, int power, TracePath path = TracePath::automatic);
// tr(M^l) for l = 1..max_power in one pass.
std::vector<cplx> trace_powers(const Eigen::MatrixXcd& m, int max_power);

// sum over lattice pairs (j, j - m) missing from the truncated basis of
// c_m conj(c_m) / ((kappa - i xi_j)(kappa + i xi_{j-m})).
cplx first_trace_completion(const SpectralField& field, const SpectralParameter& kappa);

// Complex digamma function.
cplx digamma(cplx w);

// Discretised (k1) integral: L sum_k 2 Re kappa |c(xi_k + 2 Im kappa)|^2 /
// (4 (Re kappa)^2 + xi_k^2). Throws std::invalid_argument when 2 Im kappa is
// not a lattice frequency.
double leading_term_closed_form(const SpectralField& field, const SpectralParameter& kappa);

// Discretised HS proxy integral with log(4 + xi^2/(Re kappa)^2) / sqrt(4 (Re kappa)^2 + xi^2).
double hs_closed_form_proxy(const SpectralField& field, const SpectralParameter& kappa);

enum class AlphaMethod { logdet, series };

struct AlphaOptions {
    AlphaMethod method = AlphaMethod::logdet;
    int max_power = 12;
    bool complete_first_trace = true;
};

struct AlphaResult {
    double value = 0.0;
    // Re tr(K^l) / l for the series path (the l = 1 term includes the
    // completion when enabled); empty for logdet.
    std::vector<double> terms;
    int max_power = 0;
    double hs = 0.0;
    double tail_bound = 0.0;
    bool converged = false;
    double completion = 0.0;  // Re of the first-trace completion included in value
};

// logdet throws std::domain_error when I - K is numerically singular.
AlphaResult alpha(const OperatorMatrix& k, const AlphaOptions& options = {});
AlphaResult alpha(const SpectralField& field, const SpectralParameter& kappa,
                  const AlphaOptions& options = {});

struct Kappa0Choice {
    double kappa0 = 1.0;
    double max_hs = 0.0;
    double delta = 0.0;
    // (kappa0, max_n hs) for every candidate tried.
    std::vector<std::pair<double, double>> history;
};

// Doubling search over kappa0 = 1, 2, 4, ... until max_{n in [n_lo, n_hi]}
// hs(K(kappa0 + i n/2)) <= 1/2. delta <= 0 selects 1/(8q). Throws
// std::invalid_argument for delta outside (0, 1/(4q)) and std::runtime_error
// past kappa0 = 2^20.
Kappa0Choice choose_kappa0(const SpectralField& field, double s, double q, double delta,
                           std::int64_t n_lo, std::int64_t n_hi);

struct LatticeRow {
    std::int64_t n = 0;
    double alpha = 0.0;
    double alpha_series = 0.0;  // NaN unless both paths were requested
    double tail_bound = 0.0;
    double leading = 0.0;
    double residual = 0.0;
    double hs = 0.0;
    bool converged = false;
};

struct LatticeProfile {
    double kappa0 = 1.0;
    double s = 0.0;
    double q = 2.0;
    double delta = 0.0;
    std::vector<LatticeRow> rows;
    // || <n>^{2s} residual ||_{l^{q/2}}
    double residual_norm = 0.0;
    // kappa0^{-4 delta} ||u||_{M^s_{2,q}}^4
    double comparison = 0.0;
    // (sum <n>^{sq} (kappa0 leading_n / 2)^{q/2})^{1/q}, which is the Z-norm
    // restricted to the profile's n range.
    double leading_z = 0.0;
};

LatticeProfile alpha_lattice_profile(const SpectralField& field, double kappa0, double s, double q,
                                     double delta, std::int64_t n_lo, std::int64_t n_hi,
                                     bool both_paths = false);

}  // namespace biharmonic
