// Time integration of
//
//   i u_t + beta u_xx + gamma u_xxxx + F(u) = 0,
//   F = a1 u|u|^2 + a2 u_xx|u|^2 + a3 conj(u_xx) u^2 + a4 u_x^2 conj(u) + a5 u|u_x|^2 + a6 u|u|^4,
//
// written as u_t = i(beta u_xx + gamma u_xxxx + F). The default coefficients
// (beta = 0, gamma = 1, a = (0, 8, 2, 6, 4, 6)) are the integrable 4NLS; any
// other choice is accepted by the integrator but alpha is only conserved for
// the integrable one.
#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "biharmonic/determinant.hpp"
#include "biharmonic/kernels.hpp"
#include "biharmonic/spectral.hpp"

namespace biharmonic {

struct Coefficients {
    double beta = 0.0;
    double gamma = 1.0;
    kernels::NonlinearWeights weights;

    bool is_integrable() const;
};

struct PhysicsOptions {
    Coefficients coefficients;
    bool nonlinear = true;
    // Products are formed on a grid padded by this factor (1 = no dealiasing).
    // Exact dealiasing of the quintic term would need 3.
    int padding = 2;
};

// F(u), pseudospectral. The Nyquist mode is dropped on input and output.
SpectralField nonlinearity(const SpectralField& field, const PhysicsOptions& physics = {});

// omega in u = a e^{i(kx + omega t)}:
//   gamma k^4 - beta k^2 + a1 a^2 + (a5 - a2 - a3 - a4) k^2 a^2 + a6 a^4,
// which for the integrable coefficients is k^4 - 12 a^2 k^2 + 6 a^4.
double plane_wave_frequency(double amplitude, double k, const Coefficients& c = {});

// Throws std::invalid_argument when k is not a lattice frequency of the grid.
SpectralField plane_wave_reference(const SpectralGrid& grid, double amplitude, double k, double t,
                                   const Coefficients& c = {});

class BlowUpError : public std::runtime_error {
public:
    BlowUpError(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

// ETDRK4 (Cox-Matthews) with the phi-functions averaged over a 32-point circle
// of radius 1 around each dt * symbol, which avoids cancellation near zero.
class Etdrk4Stepper {
public:
    Etdrk4Stepper(const SpectralGrid& grid, double dt, PhysicsOptions physics = {});
    ~Etdrk4Stepper();
    Etdrk4Stepper(Etdrk4Stepper&&) noexcept;
    Etdrk4Stepper& operator=(Etdrk4Stepper&&) noexcept;

    double dt() const noexcept;
    const SpectralGrid& grid() const noexcept;

    SpectralField step(const SpectralField& field) const;
    // In-place on a storage-order spectrum; skips building SpectralFields.
    void advance(std::vector<cplx>& spectrum) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

SpectralField step(const SpectralField& field, double dt, const PhysicsOptions& physics = {});

struct InitialData {
    // zero | gaussian | plane_wave | packet
    std::string profile = "gaussian";
    double amplitude = 0.5;
    double width = 1.0;       // gaussian: a e^{-((x - x0)/width)^2}; packet envelope
    double center = 0.0;
    double wavenumber = 0.0;  // carrier frequency (gaussian, plane_wave)
    double band = 4.0;        // packet: random modes with |xi| <= band
    std::uint64_t seed = 0;
};

SpectralField make_initial_data(const SpectralGrid& grid, const InitialData& data);

// Fraction of the mass outside |x| <= L/4.
double outer_mass_fraction(const SpectralField& field);

struct DiagnosticsOptions {
    std::vector<SpectralParameter> kappas;
    double s = 0.5;
    double q = 4.0;
    double z_kappa0 = 1.0;
    bool z_norm = true;
    // Fields on finer grids are spectrally truncated to this size before any
    // determinant work.
    std::size_t determinant_points = 1024;
};

struct Diagnostics {
    double mass = 0.0;
    double sobolev = 0.0;     // H^s
    double modulation = 0.0;  // M^s_{2,q}
    double z = 0.0;           // Z^s_{z_kappa0,q}; NaN when not computed
    std::vector<double> alpha;
    std::vector<double> hs;
};

Diagnostics diagnose(const SpectralField& field, const DiagnosticsOptions& options);

struct SimulationConfig {
    double box_length = 0.0;
    std::size_t points = 0;
    InitialData data;
    double dt = 1e-4;
    double horizon = 0.0;
    std::size_t record_every = 1;
    PhysicsOptions physics;
    DiagnosticsOptions diagnostics;
    // Reject initial data with more than 1e-12 of its mass outside |x| <= L/4.
    bool line_guard = true;

    void validate() const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<SpectralField> fields;
    std::vector<Diagnostics> diagnostics;
    std::vector<SpectralParameter> kappas;
    double dt = 0.0;  // step actually used (horizon / steps)
};

// Throws BlowUpError when the solution stops being finite or its sup norm
// exceeds 1e6 times the initial one, and std::invalid_argument when the line
// guard or config validation fails.
Trajectory simulate(const SimulationConfig& config);
Trajectory simulate(const SpectralField& initial, const SimulationConfig& config);

struct KappaSeries {
    SpectralParameter kappa;
    std::vector<double> alpha;
    std::vector<double> hs;
    double drift = 0.0;          // max_t |alpha(t) - alpha(0)| / max(|alpha(0)|, floor)
    bool criterion_met = true;   // hs <= 1/2 at every snapshot
};

struct ConservationReport {
    std::vector<double> times;
    std::vector<KappaSeries> series;
    std::vector<double> mass;
    double mass_drift = 0.0;
    std::vector<double> modulation;
    std::vector<double> z;
    bool all_criteria_met = true;
};

ConservationReport conservation_report(const Trajectory& trajectory,
                                       const std::vector<SpectralParameter>& kappas,
                                       double floor = 1e-14);

}  // namespace biharmonic
