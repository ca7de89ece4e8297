#include "frwsim/initial_data.hpp"

#include <cmath>
#include <sstream>

#include "frwsim/error.hpp"

namespace frwsim {
namespace {

void require_finite(double x, const char* name) {
    if (!std::isfinite(x)) {
        throw DomainError(std::string(name) + " must be finite");
    }
}

}  // namespace

U0Solution solve_u0(const ModelParams& params, double phi0, double chi0, double rho0,
                    Branch branch) {
    validate(params);
    require_finite(phi0, "phi0");
    require_finite(chi0, "chi0");
    require_finite(rho0, "rho0");
    if (chi0 < 0.0) throw DomainError("chi0 must be >= 0");
    if (rho0 < 0.0) throw DomainError("rho0 must be >= 0");

    const double m2 = params.mass * params.mass;
    const double energy = 0.5 * chi0 * chi0 + 0.5 * m2 * phi0 * phi0 + rho0;
    const double radicand = (params.lambda + 8.0 * kPi * energy) / 3.0;
    if (radicand < 0.0) {
        std::ostringstream msg;
        msg << "constraint has no real solution: (Lambda + 8 pi T) / 3 = " << radicand;
        throw NoRealBranch(msg.str());
    }
    U0Solution out;
    out.u0 = std::sqrt(radicand);
    if (branch == Branch::contracting) out.u0 = -out.u0;
    out.degenerate = radicand == 0.0;
    return out;
}

double solve_rho0(const ModelParams& params, double u0, double phi0, double chi0) {
    validate(params);
    require_finite(u0, "u0");
    require_finite(phi0, "phi0");
    require_finite(chi0, "chi0");
    if (chi0 < 0.0) throw DomainError("chi0 must be >= 0");

    const double m2 = params.mass * params.mass;
    const double field = 0.5 * chi0 * chi0 + 0.5 * m2 * phi0 * phi0;
    const double lhs = 3.0 * u0 * u0 - params.lambda;
    const double rho0 = lhs / (8.0 * kPi) - field;
    if (rho0 >= 0.0) return rho0;
    // Rounding-level negatives are zero density.
    const double scale = std::abs(lhs) / (8.0 * kPi) + field;
    if (-rho0 <= kConstructionTolerance * (1.0 + scale)) return 0.0;
    std::ostringstream msg;
    msg << "u0 = " << u0 << " forces negative density rho0 = " << rho0;
    throw NegativeDensity(msg.str());
}

void validate(const InitialData& d, const ModelParams& params) {
    validate(params);
    require_finite(d.a0, "a0");
    require_finite(d.u0, "u0");
    require_finite(d.phi0, "phi0");
    require_finite(d.chi0, "chi0");
    require_finite(d.rho0, "rho0");
    if (d.a0 <= 0.0) throw DomainError("a0 must be > 0");
    if (d.chi0 < 0.0) throw DomainError("chi0 must be >= 0");
    if (d.rho0 < 0.0) throw DomainError("rho0 must be >= 0");

    const CosmoState s = build_state(d);
    const double c = constraint_residual(s, params);
    const double scale = 1.0 + std::abs(params.lambda) +
                         8.0 * kPi * (field_energy(s, params) + s.rho);
    if (std::abs(c) > kConstructionTolerance * scale) {
        std::ostringstream msg;
        msg << "initial data violate the Hamiltonian constraint: residual " << c;
        throw DomainError(msg.str());
    }
}

std::optional<double> rate_nu(const ModelParams& params, double phi0) {
    const double radicand =
        (params.lambda + 4.0 * kPi * params.mass * params.mass * phi0 * phi0) / 3.0;
    if (!(radicand > 0.0)) return std::nullopt;
    return std::sqrt(radicand);
}

AdmissibilityReport validate_theorem1(const ModelParams& params, const InitialData& d) {
    AdmissibilityReport r;
    r.lambda_bound_ok =
        params.lambda > -4.0 * kPi * params.mass * params.mass * d.phi0 * d.phi0;
    r.phi0_positive = d.phi0 > 0.0;
    r.u0_positive = d.u0 > 0.0;
    r.chi0_nonneg = d.chi0 >= 0.0;
    r.rho0_nonneg = d.rho0 >= 0.0;
    r.theorem1_applicable = r.lambda_bound_ok && r.phi0_positive && r.u0_positive &&
                            r.chi0_nonneg && r.rho0_nonneg;
    if (r.lambda_bound_ok) r.nu = rate_nu(params, d.phi0);
    return r;
}

CosmoState build_state(const InitialData& d) {
    if (!(d.a0 > 0.0) || !std::isfinite(d.a0)) {
        throw DomainError("a0 must be finite and > 0");
    }
    CosmoState s;
    s.t = 0.0;
    s.u = d.u0;
    s.v = 1.0 / (d.a0 * d.a0);
    s.phi = d.phi0;
    s.chi = d.chi0;
    s.rho = d.rho0;
    return s;
}

}  // namespace frwsim
