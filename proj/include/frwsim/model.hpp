#pragma once

#include <numbers>

namespace frwsim {

inline constexpr double kPi = std::numbers::pi;

/// Fixed physical constants: cosmological constant and scalar-field mass
/// (geometrized units, G = c = 1).
struct ModelParams {
    double lambda = 0.0;
    double mass = 0.0;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Throws DomainError unless lambda is finite and mass is finite and >= 0.
void validate(const ModelParams& params);

/// Dynamical state of the reduced first-order system.
///
/// u is the Hubble variable a'/a, v = 1/a^2, chi = phi'. The kinetic energy
/// psi = chi^2/2 is derived, never stored.
struct CosmoState {
    double t = 0.0;
    double u = 0.0;
    double v = 1.0;
    double phi = 0.0;
    double chi = 0.0;
    double rho = 0.0;

    [[nodiscard]] double psi() const noexcept { return 0.5 * chi * chi; }

    friend bool operator==(const CosmoState&, const CosmoState&) = default;
};

/// Throws DomainError on any non-finite component.
void require_finite(const CosmoState& state);

struct StateDerivative {
    double du = 0.0;
    double dv = 0.0;
    double dphi = 0.0;
    double dchi = 0.0;
    double drho = 0.0;
};

struct DerivedQuantities {
    double H = 0.0;           // mean curvature 3u
    double T00 = 0.0;         // psi + m^2 phi^2 / 2
    double Q = 0.0;           // H^2 - 24 pi T00 - 3 Lambda
    double constraint = 0.0;  // Hamiltonian constraint residual
};

/// Right-hand side of the reduced Einstein / Klein-Gordon / fluid system.
/// Autonomous; the time component of the state is ignored.
[[nodiscard]] StateDerivative rhs(const CosmoState& state, const ModelParams& params);

/// C = 3u^2 - Lambda - 8 pi (psi + m^2 phi^2 / 2 + rho). Zero on-shell.
[[nodiscard]] double constraint_residual(const CosmoState& state, const ModelParams& params);

/// Scalar-field energy density psi + m^2 phi^2 / 2.
[[nodiscard]] double field_energy(const CosmoState& state, const ModelParams& params);

[[nodiscard]] DerivedQuantities derived(const CosmoState& state, const ModelParams& params);

/// a = v^(-1/2); throws DomainError for v <= 0.
[[nodiscard]] double scale_factor(const CosmoState& state);

}  // namespace frwsim
