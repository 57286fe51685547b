#include "biharmonic/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "biharmonic/kernels.hpp"
#include "fft.hpp"

namespace biharmonic {
namespace {

constexpr double kPi = std::numbers::pi;

void require_same_grid(const SpectralField& a, const SpectralField& b) {
    if (!(a.grid() == b.grid())) throw std::invalid_argument("fields live on different grids");
}

}  // namespace

SpectralGrid::SpectralGrid(double box_length, std::size_t points)
    : length_(box_length), points_(points) {
    if (!(box_length > 0.0) || !std::isfinite(box_length)) {
        throw std::invalid_argument("box length must be positive and finite");
    }
    if (points < 8 || points % 2 != 0) {
        throw std::invalid_argument("point count must be even and at least 8, got " +
                                    std::to_string(points));
    }
}

double SpectralGrid::frequency_step() const noexcept { return 2.0 * kPi / length_; }

std::int64_t SpectralGrid::wavenumber(std::size_t index) const noexcept {
    const auto i = static_cast<std::int64_t>(index);
    const auto n = static_cast<std::int64_t>(points_);
    return i < n / 2 ? i : i - n;
}

double SpectralGrid::frequency(std::size_t index) const noexcept {
    return frequency_step() * static_cast<double>(wavenumber(index));
}

std::optional<std::size_t> SpectralGrid::index_of(std::int64_t k) const noexcept {
    const auto n = static_cast<std::int64_t>(points_);
    if (k < -n / 2 || k >= n / 2) return std::nullopt;
    return static_cast<std::size_t>(k >= 0 ? k : k + n);
}

double SpectralGrid::position(std::size_t j) const noexcept {
    return -0.5 * length_ + static_cast<double>(j) * spacing();
}

double SpectralGrid::max_frequency() const noexcept {
    return kPi * static_cast<double>(points_) / length_;
}

std::vector<double> SpectralGrid::frequencies() const {
    std::vector<double> xi(points_);
    const auto half = static_cast<std::int64_t>(points_ / 2);
    for (std::size_t i = 0; i < points_; ++i) {
        xi[i] = frequency_step() * static_cast<double>(static_cast<std::int64_t>(i) - half);
    }
    return xi;
}

std::vector<double> SpectralGrid::positions() const {
    std::vector<double> x(points_);
    for (std::size_t j = 0; j < points_; ++j) x[j] = position(j);
    return x;
}

SpectralGrid make_grid(double box_length, std::size_t points) {
    return SpectralGrid(box_length, points);
}

cplx SpectralField::coefficient(std::int64_t k) const noexcept {
    const auto idx = grid_.index_of(k);
    return idx ? spectrum_[*idx] : cplx{};
}

// With x_j = -L/2 + j dx, e^{-i xi_k x_j} = (-1)^k e^{-2 pi i jk/N}, so the
// torus coefficients are the plain DFT divided by N with an alternating sign.
SpectralField analyze(std::vector<cplx> physical, const SpectralGrid& grid) {
    if (physical.size() != grid.size()) {
        throw std::invalid_argument("sample count " + std::to_string(physical.size()) +
                                    " does not match grid size " + std::to_string(grid.size()));
    }
    const std::size_t n = grid.size();
    std::vector<cplx> spectrum(n);
    fft::forward(physical.data(), spectrum.data(), n);
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        spectrum[i] *= (grid.wavenumber(i) & 1) ? -inv : inv;
    }
    return SpectralField(grid, std::move(physical), std::move(spectrum));
}

SpectralField synthesize(std::vector<cplx> spectrum, const SpectralGrid& grid) {
    if (spectrum.size() != grid.size()) {
        throw std::invalid_argument("coefficient count " + std::to_string(spectrum.size()) +
                                    " does not match grid size " + std::to_string(grid.size()));
    }
    const std::size_t n = grid.size();
    std::vector<cplx> signed_coeffs(spectrum);
    for (std::size_t i = 0; i < n; ++i) {
        if (grid.wavenumber(i) & 1) signed_coeffs[i] = -signed_coeffs[i];
    }
    std::vector<cplx> physical(n);
    fft::backward(signed_coeffs.data(), physical.data(), n);
    return SpectralField(grid, std::move(physical), std::move(spectrum));
}

SpectralField sample(const SpectralGrid& grid, const std::function<cplx(double)>& profile) {
    std::vector<cplx> values(grid.size());
    for (std::size_t j = 0; j < values.size(); ++j) values[j] = profile(grid.position(j));
    return analyze(std::move(values), grid);
}

SpectralField zero_field(const SpectralGrid& grid) {
    return synthesize(std::vector<cplx>(grid.size()), grid);
}

SpectralField scaled(const SpectralField& field, cplx factor) {
    std::vector<cplx> c(field.spectrum().begin(), field.spectrum().end());
    for (auto& v : c) v *= factor;
    return synthesize(std::move(c), field.grid());
}

SpectralField sum(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a, b);
    std::vector<cplx> c(a.spectrum().begin(), a.spectrum().end());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += b.spectrum()[i];
    return synthesize(std::move(c), a.grid());
}

SpectralField difference(const SpectralField& a, const SpectralField& b) {
    return sum(a, scaled(b, -1.0));
}

SpectralField conjugated(const SpectralField& field) {
    std::vector<cplx> u(field.physical().begin(), field.physical().end());
    for (auto& v : u) v = std::conj(v);
    return analyze(std::move(u), field.grid());
}

SpectralField without_nyquist(const SpectralField& field) {
    std::vector<cplx> c(field.spectrum().begin(), field.spectrum().end());
    c[field.grid().nyquist_index()] = 0.0;
    return synthesize(std::move(c), field.grid());
}

SpectralField resample(const SpectralField& field, std::size_t points) {
    const SpectralGrid target(field.grid().box_length(), points);
    const auto& src = field.grid();
    std::vector<cplx> c(points);
    const auto half = static_cast<std::int64_t>(std::min(points, src.size()) / 2);
    for (std::int64_t k = -half + 1; k < half; ++k) {
        c[*target.index_of(k)] = field.coefficient(k);
    }
    return synthesize(std::move(c), target);
}

SpectralField dilate(const SpectralField& field, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("dilation factor must be positive");
    }
    const SpectralGrid target(field.grid().box_length() / lambda, field.size());
    // u(lambda x) sampled at x_j has the same values as u at lambda x_j, which
    // are exactly the source samples; the torus coefficients are unchanged.
    return analyze(std::vector<cplx>(field.physical().begin(), field.physical().end()), target);
}

SpectralField apply_multiplier(const SpectralField& field,
                               const std::function<cplx(double)>& symbol) {
    const auto& grid = field.grid();
    std::vector<cplx> m(grid.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double xi = grid.frequency(i);
        m[i] = symbol(xi);
        if (!std::isfinite(m[i].real()) || !std::isfinite(m[i].imag())) {
            throw std::domain_error("multiplier is not finite at xi = " + std::to_string(xi));
        }
    }
    return apply_symbol(field, m);
}

SpectralField apply_symbol(const SpectralField& field, std::span<const cplx> symbol) {
    if (symbol.size() != field.size()) {
        throw std::invalid_argument("symbol table length does not match the grid");
    }
    std::vector<cplx> c(field.spectrum().begin(), field.spectrum().end());
    kernels::multiply(c, symbol);
    return synthesize(std::move(c), field.grid());
}

SpectralField derivative(const SpectralField& field, int order) {
    if (order < 0) throw std::invalid_argument("derivative order must be non-negative");
    return apply_multiplier(field, [order](double xi) { return std::pow(cplx(0.0, xi), order); });
}

SpectralField free_evolve(const SpectralField& field, double t) {
    return apply_multiplier(field, [t](double xi) {
        const double xi2 = xi * xi;
        return std::polar(1.0, t * xi2 * xi2);
    });
}

WindowFamily WindowFamily::cosine_squared() {
    return WindowFamily([](double xi) {
        if (std::abs(xi) >= 1.0) return 0.0;
        const double c = std::cos(0.5 * kPi * xi);
        return c * c;
    });
}

WindowFamily::WindowFamily(std::function<double(double)> profile) : profile_(std::move(profile)) {
    if (!profile_) throw std::invalid_argument("window profile is empty");
    for (double xi : {1.0, -1.0, 1.25, -1.25, 2.0, -2.0, 7.5, -7.5}) {
        if (profile_(xi) != 0.0) {
            throw std::invalid_argument("window is not supported in [-1, 1]");
        }
    }
}

double WindowFamily::operator()(double xi) const {
    if (std::abs(xi) >= 1.0) return 0.0;
    return profile_(xi);
}

double WindowFamily::partition_defect(double lo, double hi, std::size_t samples) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double xi =
            samples > 1 ? lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1)
                        : lo;
        const auto n0 = static_cast<std::int64_t>(std::floor(xi));
        double total = 0.0;
        for (std::int64_t n = n0 - 1; n <= n0 + 2; ++n) total += shifted(xi, n);
        worst = std::max(worst, std::abs(total - 1.0));
    }
    return worst;
}

std::pair<std::int64_t, std::int64_t> box_range(const SpectralGrid& grid) {
    const double lo = grid.frequency(grid.nyquist_index());
    const double hi = grid.frequency(grid.size() / 2 - 1);
    return {static_cast<std::int64_t>(std::floor(lo)), static_cast<std::int64_t>(std::ceil(hi))};
}

SpectralField box_project(const SpectralField& field, std::int64_t n, const WindowFamily& windows) {
    return apply_multiplier(field, [&](double xi) { return cplx(windows.shifted(xi, n), 0.0); });
}

SpectralField band_project(const SpectralField& field, int level) {
    if (level < 0) throw std::invalid_argument("dyadic level must be non-negative");
    const double hi = std::ldexp(1.0, level);
    const double lo = level == 0 ? 0.0 : 0.5 * hi;
    return apply_multiplier(field, [lo, hi](double xi) {
        const double a = std::abs(xi);
        return (a >= lo && a < hi) ? cplx(1.0) : cplx(0.0);
    });
}

int max_band_level(const SpectralGrid& grid) {
    const double top = grid.max_frequency();
    int j = 0;
    while (std::ldexp(1.0, j) <= top) ++j;
    return j;
}

SpectralField frequency_cut(const SpectralField& field, double lo, double hi) {
    return apply_multiplier(field, [lo, hi](double xi) {
        return (xi >= lo && xi < hi) ? cplx(1.0) : cplx(0.0);
    });
}

}  // namespace biharmonic
