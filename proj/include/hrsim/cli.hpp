#pragma once

#include "hrsim/config.hpp"

#include <iosfwd>
#include <string>

namespace hrsim {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,     ///< malformed flags, config file or parameter ranges
    kExitNumerical = 3,  ///< solver, quadrature or horizon failure at run time
    kExitViolation = 4,  ///< diagnostic bound violation under --strict (or a failed verify)
};

/// Executes `cfg.command`, writing CSVs, plot.gp and manifest.txt into
/// `cfg.out`. Library errors propagate; the exit code reports violations.
int run(const RunConfig& cfg, std::ostream& log);

/// Parses argv (subcommand plus flags), runs, and maps errors to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// SHA-1 of the git blob object holding `content`, as lowercase hex.
std::string git_blob_sha1(const std::string& content);

} // namespace hrsim
