#include <cmath>
#include <random>

#include <doctest.h>

#include "frwsim/error.hpp"
#include "frwsim/initial_data.hpp"

using namespace frwsim;

namespace {
// 30-digit arithmetic oracle values.
constexpr double kSqrt4PiOver3 = 2.04665341589297697695910324978;
constexpr double kNuReference = 2.12652851805935683246423031138;
}  // namespace

TEST_CASE("solve_u0 branches") {
    const ModelParams p{0.0, 1.0};
    const U0Solution up = solve_u0(p, 1.0, 0.0, 0.0, Branch::expanding);
    const U0Solution down = solve_u0(p, 1.0, 0.0, 0.0, Branch::contracting);
    CHECK(up.u0 == doctest::Approx(kSqrt4PiOver3).epsilon(1e-15));
    CHECK(down.u0 == -up.u0);
    CHECK_FALSE(up.degenerate);
}

TEST_CASE("solve_u0: negative radicand has no real branch") {
    // -13 + 4 pi = -0.4336...
    CHECK_THROWS_AS((void)solve_u0(ModelParams{-13.0, 1.0}, 1.0, 0.0, 0.0, Branch::expanding), NoRealBranch);
}

TEST_CASE("solve_u0: zero radicand is flagged") {
    const U0Solution s = solve_u0(ModelParams{0.0, 1.0}, 0.0, 0.0, 0.0, Branch::expanding);
    CHECK(s.u0 == 0.0);
    CHECK(s.degenerate);
}

TEST_CASE("solve_u0 rejects negative velocity or density") {
    const ModelParams p{0.0, 1.0};
    CHECK_THROWS_AS((void)solve_u0(p, 1.0, -0.1, 0.0, Branch::expanding), DomainError);
    CHECK_THROWS_AS((void)solve_u0(p, 1.0, 0.0, -0.1, Branch::expanding), DomainError);
    CHECK_THROWS_AS((void)solve_u0(p, std::nan(""), 0.0, 0.0, Branch::expanding), DomainError);
}

TEST_CASE("solve_rho0 inverts the constraint") {
    const ModelParams p{1.0, 1.0};
    const double u0 = solve_u0(p, 1.0, 0.1, 0.05, Branch::expanding).u0;
    CHECK(solve_rho0(p, u0, 1.0, 0.1) == doctest::Approx(0.05).epsilon(1e-12));
    // u0 below the field-only value forces negative density.
    CHECK_THROWS_AS((void)solve_rho0(p, 0.5, 1.0, 0.1), NegativeDensity);
}

TEST_CASE("validate_theorem1 examples") {
    SUBCASE("reference data are admissible") {
        const ModelParams p{1.0, 1.0};
        InitialData d{1.0, 0.0, 1.0, 0.1, 0.05};
        d.u0 = solve_u0(p, d.phi0, d.chi0, d.rho0, Branch::expanding).u0;
        const AdmissibilityReport r = validate_theorem1(p, d);
        CHECK(r.theorem1_applicable);
        REQUIRE(r.nu.has_value());
        CHECK(*r.nu == doctest::Approx(kNuReference).epsilon(1e-14));
    }
    SUBCASE("negative phi0") {
        const ModelParams p{0.0, 1.0};
        InitialData d{1.0, 0.0, -1.0, 0.0, 0.0};
        d.u0 = solve_u0(p, d.phi0, d.chi0, d.rho0, Branch::expanding).u0;
        const AdmissibilityReport r = validate_theorem1(p, d);
        CHECK_FALSE(r.phi0_positive);
        CHECK_FALSE(r.theorem1_applicable);
    }
    SUBCASE("contracting branch") {
        const ModelParams p{1.0, 1.0};
        InitialData d{1.0, 0.0, 1.0, 0.1, 0.05};
        d.u0 = solve_u0(p, d.phi0, d.chi0, d.rho0, Branch::contracting).u0;
        const AdmissibilityReport r = validate_theorem1(p, d);
        CHECK_FALSE(r.u0_positive);
        CHECK_FALSE(r.theorem1_applicable);
    }
    SUBCASE("lambda below the bound has no nu") {
        const AdmissibilityReport r = validate_theorem1(ModelParams{-13.0, 1.0}, InitialData{1.0, 1.0, 1.0, 0.0, 0.0});
        CHECK_FALSE(r.lambda_bound_ok);
        CHECK_FALSE(r.nu.has_value());
    }
}

TEST_CASE("build_state") {
    CHECK(build_state(InitialData{1.0, 0.5, 0.0, 0.0, 0.0}).v == 1.0);
    CHECK(build_state(InitialData{2.0, 0.5, 0.0, 0.0, 0.0}).v == 0.25);
    for (double a0 : {0.5, 1.0, 7.0}) {
        CHECK(scale_factor(build_state(InitialData{a0, 1.0, 0.0, 0.0, 0.0})) ==
              doctest::Approx(a0).epsilon(1e-15));
    }
    CHECK_THROWS_AS((void)build_state(InitialData{0.0, 1.0, 0.0, 0.0, 0.0}), DomainError);
    CHECK_THROWS_AS((void)build_state(InitialData{-1.0, 1.0, 0.0, 0.0, 0.0}), DomainError);
}

TEST_CASE("validate(InitialData) rejects off-shell data") {
    const ModelParams p{1.0, 1.0};
    CHECK_THROWS_AS(validate(InitialData{1.0, 3.0, 1.0, 0.1, 0.05}, p), DomainError);
}

TEST_CASE("property: constructed data satisfy the constraint; branches are negatives") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> lam(-10.0, 10.0), mass(0.0, 3.0), phi(-3.0, 3.0),
        nonneg(0.0, 2.0), a0(0.1, 10.0);
    int built = 0;
    for (int i = 0; i < 5000; ++i) {
        const ModelParams p{lam(rng), mass(rng)};
        const double phi0 = phi(rng), chi0 = nonneg(rng), rho0 = nonneg(rng);
        U0Solution up, down;
        try {
            up = solve_u0(p, phi0, chi0, rho0, Branch::expanding);
            down = solve_u0(p, phi0, chi0, rho0, Branch::contracting);
        } catch (const NoRealBranch&) {
            continue;
        }
        ++built;
        CHECK(up.u0 >= 0.0);
        CHECK(down.u0 == -up.u0);
        const InitialData d{a0(rng), up.u0, phi0, chi0, rho0};
        const CosmoState s = build_state(d);
        const double T00 = field_energy(s, p);
        CHECK(std::abs(constraint_residual(s, p)) <= 1e-12 * (1.0 + std::abs(p.lambda) + 8.0 * kPi * T00));
        const AdmissibilityReport r = validate_theorem1(p, d);
        if (r.theorem1_applicable) {
            // u0 >= nu follows from the constraint with psi, rho >= 0.
            CHECK(up.u0 >= *r.nu * (1.0 - 1e-14));
        }
    }
    CHECK(built > 1000);
}
