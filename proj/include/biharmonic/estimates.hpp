// Empirical checks of the dispersive inequalities for the free group
// e^{it d_x^4}: Strichartz-type bounds, bilinear transversality decay and the
// interval L^4 bound. Each sweep draws a seeded ensemble of random packets
// per parameter value and reports the ratios plus a log-log slope fit.
//
// Only moduli enter these norms, so a narrow-band packet is stored as an
// integer carrier times a baseband field on a coarse grid over the same box.
// Evolution phases still use the true frequency (xi_carrier + xi_k)^4.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "biharmonic/spectral.hpp"

namespace biharmonic {

enum class PairKind { biharmonic, strichartz };

// 2 <= p, q <= inf and 4/p + 1/q = 1/2 (biharmonic) or 2/p + 1/q = 1/2 (Strichartz).
bool is_admissible(double p, double q, PairKind kind);

struct BandPacket {
    std::int64_t carrier = 0;  // lattice index of the carrier frequency
    SpectralField base;        // u(x) = e^{i xi_carrier x} base(x)
};

struct PacketSpec {
    double lo = 0.0;  // support lo <= xi <= hi (absolute frequencies)
    double hi = 1.0;
    bool symmetric = false;  // also include -hi <= xi <= -lo
    double envelope = 8.0;   // Gaussian envelope width in x
    double center = 0.0;
};

// Random |c| in [1/2, 1] with random phases on the support shrunk by a margin
// of min(6/envelope, width/4), times the Gaussian envelope, then sharply
// projected back onto the support. Deterministic in seed.
BandPacket random_packet(const SpectralGrid& coarse, const PacketSpec& spec, std::uint64_t seed);

// Baseband samples of e^{it d_x^4} u at time t.
std::vector<cplx> evolve_baseband(const BandPacket& packet, double t);
double packet_l2(const BandPacket& packet);

// Deterministic per-sample seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

struct SweepReport {
    std::string name;
    std::string parameter_name;
    std::vector<double> parameters;
    std::vector<std::vector<double>> ratios;  // [parameter][sample]
    std::vector<double> horizons;
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double max_ratio = 0.0;
    std::size_t ensemble = 0;
    std::uint64_t seed = 0;
    // |(int_0^T ||u||_2^2 dt)^{1/2} - sqrt(T)||u0||| / (sqrt(T)||u0||) on the
    // first sample: the unitarity anchor every sweep checks.
    double calibration_error = 0.0;

    std::vector<double> means() const;  // geometric mean per parameter
};

// Least squares of log y on log x over all (x, y) pairs.
void fit_loglog(SweepReport& report);

struct StrichartzSweep {
    double p = 8.0;
    double q = 4.0;
    PairKind kind = PairKind::strichartz;
    std::vector<double> levels = {4, 8, 16, 32};  // data on N/2 <= |xi| < N
    std::size_t ensemble = 16;
    std::uint64_t seed = 0;
    double box_length = 256.0;
    std::size_t points = 4096;
    double envelope_scale = 12.0;   // envelope width W / N
    double horizon_scale = 10.0;    // T_N = horizon_scale * W / N^4
    std::size_t time_samples = 1024;
};

// Ratios ||e^{it d^4} phi||_{L^p_t L^q_x([0, T_N])} / ||phi||_{L^2}, times
// <N>^{2/p} for Strichartz pairs. Throws std::invalid_argument for an
// inadmissible pair.
SweepReport strichartz_sweep(const StrichartzSweep& config);

enum class BilinearMode { separated, comparable };

struct BilinearSweep {
    BilinearMode mode = BilinearMode::separated;
    // separated: u on |xi| <= width/2, v around 3N/2 with the same width.
    std::vector<double> levels = {8, 16, 32, 64};
    // comparable: bands of this width centred at N -/+ lambda/2.
    double level = 128.0;
    std::vector<double> separations = {4, 8, 16, 32};
    double width = 2.0;
    bool conjugate = false;  // measure u conj(v) instead of u v
    std::size_t ensemble = 16;
    std::uint64_t seed = 0;
    double box_length = 256.0;
    std::size_t points = 512;  // baseband grid
    double envelope = 16.0;
    double crossings = 2.0;  // horizon = crossings * L / (4 |xi_c2^3 - xi_c1^3|)
    std::size_t time_samples = 4096;
};

// ||e^{it d^4}u0 e^{it d^4}v0||_{L^2_{x,t}([0,T])} / (||u0|| ||v0||). On a box
// of length L, one relative period L / dv plays the role of one crossing on
// the line, so the horizon is fixed in crossings. Throws
// std::invalid_argument when the supports are not separated as the estimate requires.
SweepReport bilinear_sweep(const BilinearSweep& config);

enum class IntervalSweepAxis { width, offset };

struct L4Sweep {
    IntervalSweepAxis axis = IntervalSweepAxis::width;
    double offset = 16.0;                      // I = [offset, offset + width]
    std::vector<double> widths = {4, 16, 64};  // used when axis == width
    double width = 4.0;                        // used when axis == offset
    std::vector<double> offsets = {16, 32, 64, 128};
    double q = 4.0;
    double epsilon = 0.05;
    double horizon = 1e-4;
    std::size_t ensemble = 16;
    std::uint64_t seed = 0;
    double box_length = 256.0;
    double envelope = 16.0;
    std::size_t time_samples = 1024;
    // Report ||u_I||_{L^4} / (T^{e/4} |I|^{1/4 - 1/q + e} proxy) without the
    // max <lambda>^{-3/4} factor, for measuring its exponent.
    bool drop_offset_weight = false;
};

// ||u_I||_{L^4_{x,t}([0,T])} / (T^{e/4} |I|^{1/4-1/q+e} max_{lambda in I} <lambda>^{-3/4} P)
// with P = || <lambda>^{1/2} ||box_lambda u0||_{L^2} ||_{l^q} the free-solution
// proxy for the X-norm. Requires 1 <= |I|, I within [0, inf), 0 < T < 1, q >= 4.
SweepReport l4_interval_sweep(const L4Sweep& config);

}  // namespace biharmonic
