#pragma once

#include <optional>

#include "frwsim/model.hpp"

namespace frwsim {

/// Sign of the initial expansion velocity b0 = a'(0).
enum class Branch { expanding, contracting };

/// Cauchy data at t = 0. u0 = b0 / a0.
struct InitialData {
    double a0 = 1.0;
    double u0 = 0.0;
    double phi0 = 0.0;
    double chi0 = 0.0;
    double rho0 = 0.0;

    [[nodiscard]] double b0() const noexcept { return u0 * a0; }

    friend bool operator==(const InitialData&, const InitialData&) = default;
};

/// Relative tolerance to which constructed data satisfy the constraint.
inline constexpr double kConstructionTolerance = 1e-12;

struct U0Solution {
    double u0 = 0.0;
    /// Radicand was exactly zero: u0 = 0 and the hypothesis u0 > 0 fails.
    bool degenerate = false;
};

/// Solves the Hamiltonian constraint for the Hubble variable,
/// u0 = +-sqrt((Lambda + 8 pi (chi0^2/2 + m^2 phi0^2/2 + rho0)) / 3).
/// Throws NoRealBranch when the radicand is negative.
[[nodiscard]] U0Solution solve_u0(const ModelParams& params, double phi0, double chi0,
                                  double rho0, Branch branch);

/// Solves the constraint for rho0 at a fixed u0. Throws NegativeDensity if
/// the constraint forces rho0 < 0.
[[nodiscard]] double solve_rho0(const ModelParams& params, double u0, double phi0,
                                double chi0);

/// Validates a0 > 0, chi0 >= 0, rho0 >= 0 (all finite) and that the data
/// satisfy the constraint to kConstructionTolerance. Throws DomainError.
void validate(const InitialData& data, const ModelParams& params);

struct AdmissibilityReport {
    bool lambda_bound_ok = false;  // Lambda > -4 pi m^2 phi0^2
    bool phi0_positive = false;
    bool u0_positive = false;
    bool chi0_nonneg = false;
    bool rho0_nonneg = false;
    bool theorem1_applicable = false;
    std::optional<double> nu;  // present iff lambda_bound_ok
};

/// Lower bound of u along admissible solutions,
/// nu = sqrt((Lambda + 4 pi m^2 phi0^2) / 3); empty when the radicand is <= 0.
[[nodiscard]] std::optional<double> rate_nu(const ModelParams& params, double phi0);

/// Checks the global-existence hypotheses. Never throws on inadmissible data.
[[nodiscard]] AdmissibilityReport validate_theorem1(const ModelParams& params,
                                                    const InitialData& data);

/// State at t = 0 with v = 1/a0^2. Throws DomainError for a0 <= 0.
[[nodiscard]] CosmoState build_state(const InitialData& data);

}  // namespace frwsim
