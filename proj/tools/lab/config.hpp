// Experiment configuration: one JSON document per run. Every section and key
// is checked against a fixed schema and anything unknown is an error, reported
// with the line and column of the offending token.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "biharmonic/dynamics.hpp"
#include "biharmonic/estimates.hpp"
#include "biharmonic/norms.hpp"

namespace lab {

enum class Subcommand {
    simulate,
    alpha,
    norms,
    sweep_strichartz,
    sweep_bilinear,
    sweep_l4,
    conservation_report
};

std::optional<Subcommand> parse_subcommand(std::string_view name);
std::string_view subcommand_name(Subcommand s);

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, std::size_t line, std::size_t column);
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string message_;
    std::size_t line_;
    std::size_t column_;
};

struct DeterminantSection {
    double kappa0 = 0.0;  // <= 0: choose_kappa0
    std::int64_t n_lo = -4;
    std::int64_t n_hi = 4;
    double s = 0.5;
    double q = 4.0;
    double delta = 0.0;  // <= 0: 1/(8q)
    bool both_paths = false;  // "method": "logdet" | "both"
    std::size_t points = 1024;
    double z_kappa0 = 1.0;
};

struct NormsSection {
    double s = 0.5;
    double q = 4.0;
    double kappa0 = 1.0;
    std::vector<double> lebesgue = {2.0, biharmonic::kInfinity};
};

struct OutputSection {
    bool plot = false;
    bool spectra = true;  // trajectory JSON carries every snapshot spectrum
};

struct LabConfig {
    Subcommand subcommand = Subcommand::simulate;
    std::uint64_t seed = 0;

    double box_length = 16.0 * 3.141592653589793;
    std::size_t points = 512;
    biharmonic::InitialData data;

    biharmonic::PhysicsOptions physics;
    double dt = 1e-4;
    double horizon = 0.05;
    std::size_t record_every = 100;
    bool line_guard = true;

    DeterminantSection determinant;
    NormsSection norms;
    biharmonic::StrichartzSweep strichartz;
    biharmonic::BilinearSweep bilinear;
    biharmonic::L4Sweep l4;
    OutputSection output;
    std::string trajectory;  // input.trajectory (conservation-report)

    std::uint64_t config_hash = 0;  // FNV-1a of the compact re-serialized document
};

// Throws ConfigError on malformed JSON, schema violations and out-of-range
// values. A "subcommand" key, when present, must match the given one.
LabConfig parse_config(std::string_view text, Subcommand subcommand);

// 1-based line and column of byte offset `offset`.
std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset);

// Byte offset of the key (or array element) at `path`, if present.
std::optional<std::size_t> locate(std::string_view text, const std::vector<std::string>& path);

}  // namespace lab
