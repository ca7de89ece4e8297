#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "frwsim/integrator.hpp"

namespace frwsim {

struct Check {
    std::string name;
    bool pass = false;
    /// Worst (observed - allowed) over the samples; pass iff margin <= 0.
    double margin = 0.0;

    friend bool operator==(const Check&, const Check&) = default;
};

enum class Status { pass, fail, inconclusive };

[[nodiscard]] std::string_view to_string(Status status) noexcept;

/// Default thresholds. Slack on bounds that hold exactly in exact arithmetic
/// is 10 * rel_tol of the integration, scaled to the bounded quantity.
struct Tolerances {
    double envelope = 1e-2;       // Q(t) <= Q(0) exp(-3 nu t) (1 + envelope)
    double rate = 0.05;           // fitted rate >= 3 nu (1 - rate)
    double H_limit = 1e-3;        // relative, on H(t_end) vs sqrt(3 C0)
    double T00_limit = 1e-6;      // absolute, on T00(t_end) vs m^2 L / 2
    double growth = 1e-3;         // a(t) >= a0 exp(nu t) (1 - growth)
    double constraint = 1e-7;     // max |C| budget
    double quadrature = 1e-6;     // rho and v against their exp(-k int u) oracles
    double identity = 1e-13;      // |Q - 24 pi rho - 3 C| / (1 + |Q|)
    double gate = 1e-3;           // Q(t_end) / Q(0) needed for asymptotic checks

    friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct LinearFit {
    double rate = 0.0;       // minus the slope of ln y against t
    double intercept = 0.0;  // of ln y
    double residual = 0.0;   // RMS of the log-space fit
    std::size_t points = 0;
};

/// Least-squares line through (t, ln y) for samples with t in [t_lo, t_hi].
/// Throws DomainError when fewer than 8 samples fall in the window, when a
/// sample in the window has y <= 0, or when the spans differ in length.
[[nodiscard]] LinearFit fit_decay_rate(std::span<const double> t, std::span<const double> y,
                                       double t_lo, double t_hi);

/// Result of fitting one monitored series over its automatic window.
struct FittedRate {
    /// Empty when the series dropped below its resolution floor before
    /// enough points were collected (faster than any fitted exponential).
    std::optional<LinearFit> fit;
    double t_lo = 0.0;
    double t_hi = 0.0;
    bool vanished = false;
};

struct FittedRates {
    FittedRate Q;
    FittedRate rho;
    FittedRate chi2;
};

struct VerificationReport {
    std::optional<double> nu;
    std::vector<Check> checks;
    FittedRates fitted_rates;
    double L_hat = 0.0;
    double H_inf_hat = 0.0;
    double C0_hat = 0.0;
    bool a_growth_ok = false;
    double max_constraint_drift = 0.0;
    double q_floor = 0.0;
    Status status = Status::pass;
    std::vector<std::string> notes;
    Tolerances tolerances;

    [[nodiscard]] const Check* find(std::string_view name) const;
};

/// Cumulative integral of samples (t_i, f_i) from t_0, by piecewise
/// quadratic (Simpson) interpolation. Works with non-uniform spacing.
[[nodiscard]] std::vector<double> cumulative_simpson(std::span<const double> t,
                                                     std::span<const double> f);

/// Max over samples of |Q - 24 pi rho - 3 C| / (1 + |Q|).
[[nodiscard]] double q_identity_check(const Trajectory& traj);
[[nodiscard]] double q_identity_deviation(const CosmoState& state, const ModelParams& params);

/// Resolution floor of Q in double precision: three times the worst
/// constraint drift plus rounding on the terms of Q.
[[nodiscard]] double q_resolution_floor(const Trajectory& traj);

/// Bounds that hold along every admissible solution: u monotone and between
/// nu and u0, 0 < v <= v0, field energy non-increasing, Q >= 0, phi
/// non-decreasing, constraint drift, and the quadrature oracles for rho and v.
/// Throws DomainError on an empty trajectory.
[[nodiscard]] std::vector<Check> verify_bounds(const Trajectory& traj,
                                               const Tolerances& tol = {});

struct AsymptoticResult {
    Status status = Status::pass;  // pass, fail or inconclusive
    std::vector<Check> checks;
    FittedRates fitted_rates;
    double L_hat = 0.0;
    double H_inf_hat = 0.0;
    double C0_hat = 0.0;
    bool a_growth_ok = false;
    std::vector<std::string> notes;
};

/// Late-time behaviour: exponential envelope and fitted decay rates of Q,
/// rho and chi^2, the limits of phi^2, T00 and H, and exponential growth of a.
/// Returns Inconclusive (with no checks) when Q has not decayed by
/// tol.gate over the trajectory.
[[nodiscard]] AsymptoticResult verify_asymptotics(const Trajectory& traj, double nu,
                                                  const Tolerances& tol = {});

/// Runs every check and assembles the report. Pure and idempotent.
[[nodiscard]] VerificationReport verify(const Trajectory& traj, const Tolerances& tol = {});

}  // namespace frwsim
