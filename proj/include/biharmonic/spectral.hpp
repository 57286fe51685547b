//==============================================================================
// spectral.hpp
// Periodic grid, DFT-consistent field type, Fourier multipliers, the free
// biharmonic propagator e^{it d_x^4}, and the frequency-uniform / dyadic
// decompositions.
//
// Conventions
//   * The box is [-L/2, L/2) sampled at x_j = -L/2 + j L/N.
//   * Spectra hold torus coefficients c_k = (1/L) \int u e^{-i xi_k x} dx with
//     xi_k = 2 pi k / L, stored in FFT order (k = 0..N/2-1, -N/2..-1).
//   * A line formula is discretised with
//         \int dxi  ->  (2 pi / L) sum_k,    |u^(xi_k)|^2 -> (L^2 / 2 pi) |c_k|^2
//     where u^ uses the unitary 1/sqrt(2 pi) transform on R. Every routine that
//     approximates a line quantity states which factors it applied.
//==============================================================================
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace biharmonic {

using cplx = std::complex<double>;

class SpectralGrid {
public:
    // Requires L > 0, N even and N >= 8; throws std::invalid_argument otherwise.
    SpectralGrid(double box_length, std::size_t points);

    double box_length() const noexcept { return length_; }
    std::size_t size() const noexcept { return points_; }
    double spacing() const noexcept { return length_ / static_cast<double>(points_); }
    double frequency_step() const noexcept;

    // Storage (FFT) order helpers.
    std::int64_t wavenumber(std::size_t index) const noexcept;
    double frequency(std::size_t index) const noexcept;
    std::optional<std::size_t> index_of(std::int64_t k) const noexcept;
    std::size_t nyquist_index() const noexcept { return points_ / 2; }

    double position(std::size_t j) const noexcept;
    // |xi| of the Nyquist mode, pi N / L.
    double max_frequency() const noexcept;

    // xi_k for k = -N/2 .. N/2-1, ascending.
    std::vector<double> frequencies() const;
    std::vector<double> positions() const;

    bool operator==(const SpectralGrid&) const = default;

private:
    double length_;
    std::size_t points_;
};

SpectralGrid make_grid(double box_length, std::size_t points);

// Samples and spectrum of one complex field. Both views are filled at
// construction and never change, so values can be shared across threads.
class SpectralField {
public:
    const SpectralGrid& grid() const noexcept { return grid_; }
    std::span<const cplx> physical() const noexcept { return physical_; }
    std::span<const cplx> spectrum() const noexcept { return spectrum_; }
    std::size_t size() const noexcept { return physical_.size(); }

    // c_k for a signed wavenumber; zero outside the lattice.
    cplx coefficient(std::int64_t k) const noexcept;

    friend SpectralField analyze(std::vector<cplx> physical, const SpectralGrid& grid);
    friend SpectralField synthesize(std::vector<cplx> spectrum, const SpectralGrid& grid);

private:
    SpectralField(SpectralGrid grid, std::vector<cplx> physical, std::vector<cplx> spectrum)
        : grid_(grid), physical_(std::move(physical)), spectrum_(std::move(spectrum)) {}

    SpectralGrid grid_;
    std::vector<cplx> physical_;
    std::vector<cplx> spectrum_;
};

// Throws std::invalid_argument when the length differs from grid.size().
SpectralField analyze(std::vector<cplx> physical, const SpectralGrid& grid);
SpectralField synthesize(std::vector<cplx> spectrum, const SpectralGrid& grid);

SpectralField sample(const SpectralGrid& grid, const std::function<cplx(double)>& profile);
SpectralField zero_field(const SpectralGrid& grid);

SpectralField scaled(const SpectralField& field, cplx factor);
SpectralField sum(const SpectralField& a, const SpectralField& b);
SpectralField difference(const SpectralField& a, const SpectralField& b);
SpectralField conjugated(const SpectralField& field);
SpectralField without_nyquist(const SpectralField& field);

// Same box, different point count: truncates or zero-pads the spectrum. The
// Nyquist coefficient of the source is dropped.
SpectralField resample(const SpectralField& field, std::size_t points);

// The field x -> u(lambda x): identical samples on a box of length L / lambda.
SpectralField dilate(const SpectralField& field, double lambda);

// c_k -> symbol(xi_k) c_k. Throws std::domain_error when the symbol is not
// finite at some lattice frequency.
SpectralField apply_multiplier(const SpectralField& field,
                               const std::function<cplx(double)>& symbol);
// Same, with the symbol already tabulated in storage order.
SpectralField apply_symbol(const SpectralField& field, std::span<const cplx> symbol);

SpectralField derivative(const SpectralField& field, int order = 1);

// e^{i t xi^4} on every mode; unitary in L^2.
SpectralField free_evolve(const SpectralField& field, double t);

// psi with supp psi in [-1, 1] and sum_n psi(xi - n) = 1.
class WindowFamily {
public:
    // psi(xi) = cos^2(pi xi / 2) on [-1, 1].
    static WindowFamily cosine_squared();
    // Throws std::invalid_argument if psi is visibly non-zero outside [-1, 1].
    explicit WindowFamily(std::function<double(double)> profile);

    double operator()(double xi) const;
    double shifted(double xi, std::int64_t n) const { return (*this)(xi - static_cast<double>(n)); }

    // max over a uniform sample of [lo, hi] of |sum_n psi(xi - n) - 1|.
    double partition_defect(double lo, double hi, std::size_t samples) const;

private:
    std::function<double(double)> profile_;
};

// Integer box centres n whose window support [n-1, n+1] meets the lattice.
std::pair<std::int64_t, std::int64_t> box_range(const SpectralGrid& grid);

// Box_n u = F^{-1} psi(xi - n) F u.
SpectralField box_project(const SpectralField& field, std::int64_t n,
                          const WindowFamily& windows = WindowFamily::cosine_squared());

// Sharp dyadic band: |xi| in [2^{j-1}, 2^j) for j >= 1, |xi| < 1 for j = 0.
SpectralField band_project(const SpectralField& field, int level);
// Highest level needed to tile the grid.
int max_band_level(const SpectralGrid& grid);

// Arbitrary sharp frequency window lo <= xi < hi.
SpectralField frequency_cut(const SpectralField& field, double lo, double hi);

}  // namespace biharmonic
