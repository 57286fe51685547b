// Subcommand drivers. Each writes its artifacts under the output directory and
// returns the process exit code.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "lab/config.hpp"

namespace lab {

enum ExitCode : int {
    kOk = 0,
    kBadConfig = 1,   // malformed config, invalid parameters, unreadable input
    kBlowUp = 2,      // simulate stopped by the blow-up guard
    kCriterion = 3,   // some kappa violates hs <= 1/2
};

struct RunOptions {
    std::filesystem::path out = "out";
    std::optional<std::uint64_t> seed;  // overrides the config seed
    bool plot = false;                  // or output.plot in the config
};

// Parses and runs; config problems are reported on err as
// "path:line:column: message" and mapped to kBadConfig.
int run(Subcommand subcommand, const std::string& config_text, const std::string& config_name,
        const RunOptions& options, std::ostream& out, std::ostream& err);

int run(const LabConfig& config, const RunOptions& options, std::ostream& out, std::ostream& err);

}  // namespace lab
