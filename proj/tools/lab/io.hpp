// Artifact writers shared by every subcommand. Numbers are printed as the
// shortest decimal that round-trips, so reruns produce identical bytes.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lab {

std::string format_double(double v);  // nan, inf, -inf for non-finite values
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);  // 0x-prefixed, 16 digits

// Stamp placed at the top of every artifact.
struct Provenance {
    std::string subcommand;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;

    std::string line() const;  // "subcommand=... config_hash=0x... seed=..."
};

class CsvWriter {
public:
    CsvWriter(const Provenance& provenance, std::vector<std::string> columns);

    CsvWriter& cell(double v);
    CsvWriter& cell(std::int64_t v);
    CsvWriter& cell(std::string_view v);
    CsvWriter& cell(bool v);
    void end_row();  // throws std::logic_error on a column-count mismatch

    const std::string& text() const noexcept { return text_; }

private:
    std::size_t columns_;
    std::size_t filled_ = 0;
    std::string text_;
};

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool points_only = false;
};

// Log-log scatter/line plot. Non-positive values are skipped.
std::string loglog_svg(const Provenance& provenance, const std::string& title,
                       const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series);

// Writes atomically enough for batch use: temp file then rename.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace lab
