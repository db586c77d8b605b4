#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "phonongate/cli/config.hpp"
#include "phonongate/cli/report.hpp"

namespace phonongate::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kOutputEnv = "PHONONGATE_OUT";

/// --out, then $PHONONGATE_OUT, then the config's `output`, then
/// ./phonongate-out/<scenario>.
std::filesystem::path resolve_output(const RunConfig& config, const std::optional<std::filesystem::path>& cli_out);

struct RunOutcome {
    int exit_code = kExitFail;
    Report report;
    std::filesystem::path out_dir;
};

/// Executes the scenario, writes report.txt and returns the exit code.
/// Throws ConfigError for an unknown scenario.
RunOutcome run(const RunConfig& config, const std::filesystem::path& out_dir, bool strict);

/// File-level entry point: loads the config, maps errors to exit codes and
/// prints a one-line summary to `log`.
int run_file(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& cli_out,
             bool strict, std::ostream& log);

}  // namespace phonongate::cli
