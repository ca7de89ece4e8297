#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "frwsim/diagnostics.hpp"
#include "frwsim/integrator.hpp"

namespace frwsim {

/// 17 significant digits; parses back to the identical double.
[[nodiscard]] std::string format_double(double x);

/// Exact header of trajectory.csv.
inline constexpr std::string_view kTrajectoryHeader =
    "t,u,v,a,phi,chi,psi,rho,H,T00,Q,constraint";
inline constexpr std::string_view kDerivedHeader = "t,a,H,T00,Q,constraint,Q_minus_24pi_rho";

void write_trajectory_csv(const Trajectory& traj, std::ostream& out);
void write_derived_csv(const Trajectory& traj, std::ostream& out);
void write_events_json(const Trajectory& traj, std::ostream& out);
void write_meta_json(const Trajectory& traj, std::ostream& out);
void write_report_json(const VerificationReport& report, std::ostream& out);

/// Writes trajectory.csv, derived.csv, events.json and meta.json per the
/// selected formats. Throws std::runtime_error on I/O failure.
void write_run(const Trajectory& traj, const std::filesystem::path& dir, bool csv, bool json);

/// Rebuilds a trajectory from trajectory.csv, events.json and meta.json.
/// Throws std::runtime_error on missing or malformed files.
[[nodiscard]] Trajectory read_run(const std::filesystem::path& dir);

/// Two-column gnuplot data: t against each derived quantity, plus ln Q over
/// the Q fit window. Returns the number of files written.
int write_plot_data(const Trajectory& traj, const VerificationReport& report,
                    const std::filesystem::path& dir);

}  // namespace frwsim
