#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "frwsim/error.hpp"
#include "frwsim/integrator.hpp"

using namespace frwsim;

namespace {

const ModelParams kRefParams{1.0, 1.0};

InitialData reference_data() {
    InitialData d{1.0, 0.0, 1.0, 0.1, 0.05};
    d.u0 = solve_u0(kRefParams, d.phi0, d.chi0, d.rho0, Branch::expanding).u0;
    return d;
}

double max_abs_diff(const CosmoState& a, const CosmoState& b) {
    return std::max({std::abs(a.u - b.u), std::abs(a.v - b.v), std::abs(a.phi - b.phi),
                     std::abs(a.chi - b.chi), std::abs(a.rho - b.rho)});
}

double max_abs(const StateVector& e) {
    double m = 0.0;
    for (double x : e) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST_CASE("step: zero state is a fixed point") {
    const IntegratorConfig cfg;
    const CosmoState zero{0.0, 0.0, 1.0, 0.0, 0.0, 0.0};
    for (double h : {cfg.h_min, 1e-3, cfg.h_max}) {
        const StepResult r = step(zero, ModelParams{0.0, 1.0}, h, cfg);
        CHECK(r.state.u == 0.0);
        CHECK(r.state.v == 1.0);
        CHECK(r.state.phi == 0.0);
        CHECK(r.state.chi == 0.0);
        CHECK(r.state.rho == 0.0);
        CHECK(r.error_norm == 0.0);
        CHECK(r.h_next == doctest::Approx(5.0 * h));
    }
}

TEST_CASE("step: frozen de Sitter point keeps u constant") {
    const IntegratorConfig cfg;
    const double phi = 1.2;
    const double u = std::sqrt((kRefParams.lambda + 4.0 * kPi * phi * phi) / 3.0);
    CosmoState s{0.0, u, 1.0, phi, 0.0, 0.0};
    for (int i = 0; i < 20; ++i) {
        const StepResult r = step(s, kRefParams, cfg.h_max, cfg, true);
        CHECK(std::abs(r.state.u - s.u) < 1e-13);
        CHECK(r.state.chi == 0.0);
        CHECK(r.state.phi == phi);
        s = r.state;
    }
}

TEST_CASE("step: embedded error estimate scales as h^5") {
    IntegratorConfig cfg;
    cfg.h_max = 1.0;
    const CosmoState s = build_state(reference_data());
    const double h = 0.02;
    const StepResult coarse = step(s, kRefParams, h, cfg);
    const StepResult fine = step(s, kRefParams, h / 2.0, cfg);
    const double ratio = max_abs(coarse.local_error) / max_abs(fine.local_error);
    MESSAGE("Richardson ratio " << ratio);
    CHECK(ratio >= 24.0);
    CHECK(ratio <= 40.0);
}

TEST_CASE("step: precondition on h") {
    const IntegratorConfig cfg;
    const CosmoState s = build_state(reference_data());
    CHECK_THROWS_AS((void)step(s, kRefParams, cfg.h_min / 2.0, cfg), StepSizeUnderflow);
    CHECK_THROWS_AS((void)step(s, kRefParams, cfg.h_max * 2.0, cfg), DomainError);
}

TEST_CASE("dense output reproduces endpoints and tracks the exact radiation solution") {
    // m = 0, no field, Lambda = 0: on-shell u' = -2u^2, so u = u0 / (1 + 2 u0 t).
    IntegratorConfig cfg;
    cfg.h_max = 1.0;
    const ModelParams p{0.0, 0.0};
    const double rho0 = 1.0;
    const double u0 = std::sqrt(8.0 * kPi * rho0 / 3.0);
    const CosmoState s{0.0, u0, 1.0, 0.0, 0.0, rho0};
    double prev_err = 0.0;
    for (double h : {0.02, 0.01}) {
        const StepResult r = step(s, p, h, cfg);
        CHECK(max_abs_diff(r.dense.at(0.0), s) < 1e-15);
        CHECK(max_abs_diff(r.dense.at(h), r.state) < 1e-14);
        const double tm = 0.37 * h;
        const double err = std::abs(r.dense.at(tm).u - u0 / (1.0 + 2.0 * u0 * tm));
        if (prev_err > 0.0) {
            // Local interpolation error is O(h^5): halving h gains well over 2^4.
            CHECK(prev_err / err > 16.0);
        }
        prev_err = err;
    }
    CHECK(prev_err < 1e-7);
}

TEST_CASE("integrate: reference run keeps the constraint and the trajectory contract") {
    const Trajectory traj = integrate(reference_data(), kRefParams, IntegratorConfig{});
    REQUIRE(traj.termination == Termination::completed);
    REQUIRE(traj.samples.size() == 1001);
    CHECK(traj.samples.front().state == build_state(reference_data()));
    CHECK(traj.samples.back().state.t == 10.0);
    double drift = 0.0;
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        if (i > 0) REQUIRE(traj.samples[i].state.t > traj.samples[i - 1].state.t);
        drift = std::max(drift, std::abs(traj.samples[i].derived.constraint));
    }
    CHECK(drift <= 1e-7);

    const auto tf = traj.freeze_time();
    REQUIRE(tf.has_value());
    CHECK(*tf > 0.0);
    CHECK(*tf < 0.2);
    for (const auto& x : traj.samples) {
        if (x.state.t >= *tf) CHECK(x.state.chi == 0.0);
    }
    CHECK(traj.stats.accepted > 0);
    CHECK(traj.stats.rhs_evals > 7 * traj.stats.accepted);
}

TEST_CASE("integrate: freeze time converges with tolerance") {
    IntegratorConfig loose;
    loose.t_end = 0.5;
    IntegratorConfig tight = loose;
    tight.rel_tol = tight.abs_tol = 1e-13;
    const auto t1 = integrate(reference_data(), kRefParams, loose).freeze_time();
    const auto t2 = integrate(reference_data(), kRefParams, tight).freeze_time();
    REQUIRE(t1);
    REQUIRE(t2);
    CHECK(std::abs(*t1 - *t2) < 1e-8);
}

TEST_CASE("integrate: radiation reduction keeps rho a^4 constant") {
    const ModelParams p{0.0, 0.0};
    InitialData d{1.0, 0.0, 0.0, 0.0, 1.0};
    d.u0 = solve_u0(p, 0.0, 0.0, 1.0, Branch::expanding).u0;
    IntegratorConfig cfg;
    cfg.t_end = 5.0;
    cfg.override_admissibility = true;  // phi0 = 0 is outside the theorem
    const Trajectory traj = integrate(d, p, cfg);
    REQUIRE(traj.termination == Termination::completed);
    for (const auto& x : traj.samples) {
        const double a = scale_factor(x.state);
        CHECK(std::abs(x.state.rho * std::pow(a, 4) - 1.0) <= 1e-8);
        CHECK(x.state.u == doctest::Approx(d.u0 / (1.0 + 2.0 * d.u0 * x.state.t)).epsilon(1e-8));
    }
    CHECK_FALSE(traj.has_event(EventKind::FieldFrozen));
}

TEST_CASE("integrate: zero density stays exactly zero") {
    const ModelParams p{1.0, 1.0};
    InitialData d{1.0, 0.0, 1.0, 0.1, 0.0};
    d.u0 = solve_u0(p, d.phi0, d.chi0, 0.0, Branch::expanding).u0;
    const Trajectory traj = integrate(d, p, IntegratorConfig{});
    for (const auto& x : traj.samples) CHECK(x.state.rho == 0.0);
}

TEST_CASE("integrate: kg mode crosses chi = 0 and keeps going") {
    IntegratorConfig cfg;
    cfg.mode = Mode::kg;
    cfg.t_end = 5.0;
    const Trajectory traj = integrate(reference_data(), kRefParams, cfg);
    CHECK(traj.termination == Termination::completed);
    CHECK_FALSE(traj.has_event(EventKind::FieldFrozen));
    REQUIRE(traj.has_event(EventKind::ChiZeroCrossing));
    CHECK(traj.events.front().detail == "downward");
    const bool negative = std::any_of(traj.samples.begin(), traj.samples.end(),
                                      [](const Sample& x) { return x.state.chi < 0.0; });
    CHECK(negative);
}

TEST_CASE("integrate: chi0 = 0 freezes immediately in paper mode") {
    const ModelParams p{1.0, 1.0};
    InitialData d{1.0, 0.0, 1.0, 0.0, 0.05};
    d.u0 = solve_u0(p, d.phi0, 0.0, d.rho0, Branch::expanding).u0;
    IntegratorConfig cfg;
    cfg.t_end = 1.0;
    const Trajectory traj = integrate(d, p, cfg);
    REQUIRE(traj.freeze_time().has_value());
    CHECK(*traj.freeze_time() == 0.0);
    for (const auto& x : traj.samples) {
        CHECK(x.state.phi == 1.0);
        CHECK(x.state.chi == 0.0);
    }
}

TEST_CASE("integrate: admissibility gate and guards") {
    InitialData d = reference_data();
    d.u0 = -d.u0;
    IntegratorConfig cfg;
    CHECK_THROWS_AS((void)integrate(d, kRefParams, cfg), InadmissibleData);

    cfg.override_admissibility = true;
    const Trajectory traj = integrate(d, kRefParams, cfg);
    CHECK(traj.termination == Termination::guard_tripped);
    REQUIRE_FALSE(traj.events.empty());
    CHECK(traj.events.back().kind == EventKind::GuardTripped);
    CHECK(traj.samples.size() < 1001);
    CHECK_FALSE(traj.samples.empty());
}

TEST_CASE("integrate: step size underflow ends the run") {
    IntegratorConfig cfg;
    cfg.h_min = cfg.h_init = cfg.h_max = 0.5;
    cfg.rel_tol = cfg.abs_tol = 1e-14;
    const Trajectory traj = integrate(reference_data(), kRefParams, cfg);
    CHECK(traj.termination == Termination::step_underflow);
    CHECK(traj.samples.size() == 1);
}

TEST_CASE("config validation") {
    IntegratorConfig cfg;
    cfg.rel_tol = 0.0;
    CHECK_THROWS_AS(validate(cfg), DomainError);
    cfg = {};
    cfg.h_init = cfg.h_max * 2.0;
    CHECK_THROWS_AS(validate(cfg), DomainError);
    cfg = {};
    cfg.t_end = -1.0;
    CHECK_THROWS_AS(validate(cfg), DomainError);
    cfg = {};
    cfg.sample_dt = 0.0;
    CHECK_THROWS_AS(validate(cfg), DomainError);
}

TEST_CASE("property: global-existence bounds along random admissible runs") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> lam(-3.0, 3.0), mass(0.2, 1.5), phi(0.3, 1.5),
        chi(0.0, 0.5), rho(0.0, 0.5);
    IntegratorConfig cfg;
    cfg.t_end = 3.0;
    int runs = 0;
    while (runs < 12) {
        const ModelParams p{lam(rng), mass(rng)};
        InitialData d{1.0, 0.0, phi(rng), chi(rng), rho(rng)};
        if (!(p.lambda > -4.0 * kPi * p.mass * p.mass * d.phi0 * d.phi0)) continue;
        d.u0 = solve_u0(p, d.phi0, d.chi0, d.rho0, Branch::expanding).u0;
        const Trajectory traj = integrate(d, p, cfg);
        REQUIRE(traj.termination == Termination::completed);
        const double nu = *rate_nu(p, d.phi0);
        const double eps = 10.0 * cfg.rel_tol * d.u0;
        for (std::size_t i = 0; i < traj.samples.size(); ++i) {
            const auto& s = traj.samples[i].state;
            CHECK(s.u >= nu - eps);
            CHECK(s.u <= d.u0 + eps);
            CHECK(s.v > 0.0);
            CHECK(s.v <= 1.0 + 1e-12);
            if (i > 0) {
                const auto& prev = traj.samples[i - 1];
                CHECK(s.u <= prev.state.u + eps);
                CHECK(s.phi >= prev.state.phi - 1e-12);
                CHECK(traj.samples[i].derived.T00 <= prev.derived.T00 + 1e-12);
            }
        }
        ++runs;
    }
}
