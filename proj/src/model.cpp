#include "frwsim/model.hpp"

#include <cmath>
#include <string>

#include "frwsim/error.hpp"

namespace frwsim {

void validate(const ModelParams& params) {
    if (!std::isfinite(params.lambda)) {
        throw DomainError("lambda must be finite");
    }
    if (!std::isfinite(params.mass) || params.mass < 0.0) {
        throw DomainError("mass must be finite and non-negative, got " +
                          std::to_string(params.mass));
    }
}

void require_finite(const CosmoState& s) {
    if (!std::isfinite(s.t) || !std::isfinite(s.u) || !std::isfinite(s.v) ||
        !std::isfinite(s.phi) || !std::isfinite(s.chi) || !std::isfinite(s.rho)) {
        throw DomainError("state has a non-finite component");
    }
}

StateDerivative rhs(const CosmoState& s, const ModelParams& p) {
    require_finite(s);
    validate(p);
    const double m2 = p.mass * p.mass;
    StateDerivative d;
    d.du = -1.5 * s.u * s.u + 0.5 * p.lambda -
           4.0 * kPi * (s.psi() - 0.5 * m2 * s.phi * s.phi + s.rho / 3.0);
    d.dv = -2.0 * s.u * s.v;
    d.dphi = s.chi;
    d.dchi = -3.0 * s.u * s.chi - m2 * s.phi;
    d.drho = -4.0 * s.u * s.rho;
    return d;
}

double field_energy(const CosmoState& s, const ModelParams& p) {
    return s.psi() + 0.5 * p.mass * p.mass * s.phi * s.phi;
}

double constraint_residual(const CosmoState& s, const ModelParams& p) {
    require_finite(s);
    validate(p);
    return 3.0 * s.u * s.u - p.lambda - 8.0 * kPi * (field_energy(s, p) + s.rho);
}

DerivedQuantities derived(const CosmoState& s, const ModelParams& p) {
    DerivedQuantities d;
    d.constraint = constraint_residual(s, p);
    d.H = 3.0 * s.u;
    d.T00 = field_energy(s, p);
    d.Q = d.H * d.H - 24.0 * kPi * d.T00 - 3.0 * p.lambda;
    return d;
}

double scale_factor(const CosmoState& s) {
    if (!std::isfinite(s.v) || s.v <= 0.0) {
        throw DomainError("scale factor requires v > 0");
    }
    return 1.0 / std::sqrt(s.v);
}

}  // namespace frwsim
