#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "frwsim/config.hpp"
#include "frwsim/diagnostics.hpp"

namespace frwsim {

struct SweepPlan {
    RunConfig base;  // fixed parameters and integrator settings
    SweepSpec spec;
};

/// Throws ConfigError when the config has no [sweep] section.
[[nodiscard]] SweepPlan make_plan(const RunConfig& config);

/// One grid point. `outcome` is one of: ok, skipped (hypotheses fail),
/// no_real_branch, negative_density, invalid, guard_tripped, step_underflow.
struct SweepRow {
    double lambda = 0.0;
    double mass = 0.0;
    double phi0 = 0.0;
    double chi0 = 0.0;
    double rho0 = 0.0;
    std::optional<double> u0;
    bool admissible = false;
    std::string outcome;
    std::optional<double> nu;
    std::optional<VerificationReport> report;
    std::string events;  // kind@t joined by ';'
    std::string message;
    double wall_seconds = 0.0;
};

/// Runs every grid point (row-major over the declared axes) through
/// integrate and verify. Rows are computed in parallel and returned in plan
/// order; per-row failures are recorded in the row, never thrown.
[[nodiscard]] std::vector<SweepRow> run_sweep(const SweepPlan& plan);

/// Computes one grid point.
[[nodiscard]] SweepRow run_point(const RunConfig& config);

/// Deterministic table: fixed column order, 17-digit floats, no timings.
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);
void write_sweep_timing_csv(const std::vector<SweepRow>& rows, std::ostream& out);

}  // namespace frwsim
