#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

namespace frwsim::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,  // usage, config or I/O error
    kInadmissible = 2,
    kIntegratorFailure = 3,
    kVerificationFailure = 4,
    kInconclusive = 5,
};

struct SimulateOptions {
    std::optional<std::filesystem::path> out_dir;  // overrides [output] directory
    bool overwrite = false;                        // ORed with [output] overwrite
};

/// Writes trajectory.csv, derived.csv, events.json and meta.json.
int cmd_simulate(const std::filesystem::path& config_path, const SimulateOptions& options,
                 std::ostream& log);

/// Verifies a run directory and writes report.json next to it.
int cmd_verify(const std::filesystem::path& run_dir, bool overwrite, std::ostream& log);

/// Runs the [sweep] grid of a config and writes sweep.csv and sweep_timing.csv.
int cmd_sweep(const std::filesystem::path& plan_path,
              const std::optional<std::filesystem::path>& out_dir, bool overwrite,
              std::ostream& log);

/// Writes summary.txt and gnuplot data files into <run_dir>/report.
int cmd_report(const std::filesystem::path& run_dir, bool overwrite, std::ostream& log);

}  // namespace frwsim::cli
