#include <cstdlib>
#include <random>

#include <doctest.h>

#include "frwsim/config.hpp"
#include "frwsim/error.hpp"

using namespace frwsim;

namespace {

const char* kReference = R"(
# reference run
[model]
lambda = 1
mass = 1

[initial]
a0 = 1
phi0 = 1
chi0 = 0.1
rho0 = 0.05
branch = expanding

[integrator]
rel_tol = 1e-10
abs_tol = 1e-10
t_end = 10
sample_dt = 0.01
mode = paper

[output]
directory = reference   ; trailing comment
formats = csv,json
)";

}  // namespace

TEST_CASE("parse the reference config") {
    const RunConfig c = parse_config(kReference);
    CHECK(c.model == ModelParams{1.0, 1.0});
    CHECK(c.initial.phi0 == 1.0);
    CHECK(c.initial.chi0 == 0.1);
    CHECK(c.initial.rho0 == 0.05);
    CHECK(c.initial.branch == Branch::expanding);
    CHECK_FALSE(c.initial.u0.has_value());
    CHECK(c.integrator.rel_tol == 1e-10);
    CHECK(c.integrator.mode == Mode::paper);
    CHECK(c.output.directory == "reference");
    CHECK(c.output.csv);
    CHECK(c.output.json);
    CHECK_FALSE(c.output.plotdata);
    CHECK_FALSE(c.sweep.has_value());
}

TEST_CASE("strict parsing rejects typos and malformed values") {
    const auto rejects = [](const char* text) {
        CHECK_THROWS_AS((void)parse_config(text), ConfigError);
    };
    rejects("[model]\nlamda = 1\n");
    rejects("[modle]\nlambda = 1\n");
    rejects("[model]\nlambda = 1\nlambda = 2\n");
    rejects("[model]\nlambda = 1\n[model]\nmass = 1\n");
    rejects("lambda = 1\n");
    rejects("[model]\nlambda = inf\n");
    rejects("[model]\nlambda = nan\n");
    rejects("[model]\nlambda = 1x\n");
    rejects("[model]\nmass = -1\n");
    rejects("[initial]\nbranch = sideways\n");
    rejects("[initial]\nsolve_rho0 = yes\n");
    rejects("[initial]\nsolve_rho0 = true\n");
    rejects("[initial]\nu0 = 2\nrho0 = 1\nsolve_rho0 = true\n");
    rejects("[integrator]\nmode = fast\n");
    rejects("[integrator]\nrel_tol = 0\n");
    rejects("[output]\nformats = csv,xml\n");
    rejects("[sweep]\ncap = 10\n");
    rejects("[sweep]\nlambda = 1,2,3\nmass = 1,2,3\ncap = 8\n");
    rejects("[sweep]\ngamma = 1\n");
    rejects("[model]\nlambda\n");
}

TEST_CASE("error messages carry line numbers") {
    try {
        (void)parse_config("[model]\nlambda = 1\nmas = 2\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("property: serialize then parse is the identity") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> x(-20.0, 20.0), pos(1e-12, 5.0);
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < 300; ++i) {
        RunConfig c;
        c.model = {x(rng), pos(rng)};
        c.initial.a0 = pos(rng);
        c.initial.phi0 = x(rng);
        c.initial.chi0 = pos(rng);
        c.initial.branch = coin(rng) ? Branch::expanding : Branch::contracting;
        if (coin(rng)) {
            c.initial.u0 = x(rng);
            c.initial.solve_rho0 = coin(rng);
        }
        if (!c.initial.solve_rho0) c.initial.rho0 = pos(rng);
        c.integrator.rel_tol = pos(rng) * 1e-9;
        c.integrator.abs_tol = pos(rng) * 1e-9;
        c.integrator.h_min = 1e-13;
        c.integrator.h_init = 1e-3 * pos(rng);
        c.integrator.h_max = 0.5;
        c.integrator.t_end = pos(rng) * 10;
        c.integrator.sample_dt = pos(rng) * 0.01;
        c.integrator.mode = coin(rng) ? Mode::paper : Mode::kg;
        c.integrator.guards.max_abs_u = 1e3 * pos(rng);
        c.integrator.override_admissibility = coin(rng);
        c.output.directory = "run_" + std::to_string(i);
        c.output.csv = coin(rng);
        c.output.plotdata = coin(rng);
        c.output.overwrite = coin(rng);
        if (coin(rng)) {
            c.sweep = SweepSpec{{{"lambda", {x(rng), x(rng)}}, {"rho0", {pos(rng)}}}, 100, 2};
        }
        const RunConfig back = parse_config(serialize_config(c));
        CHECK(back == c);
    }
}

TEST_CASE("resolve_initial_data") {
    RunConfig c = parse_config(kReference);
    const InitialData d = resolve_initial_data(c);
    CHECK(d.u0 == doctest::Approx(2.23223888969039945051808344768).epsilon(1e-14));
    CHECK(d.rho0 == 0.05);

    SUBCASE("solve_rho0 recovers the density") {
        RunConfig e = c;
        e.initial.u0 = d.u0;
        e.initial.solve_rho0 = true;
        e.initial.rho0 = 0.0;
        CHECK(resolve_initial_data(e).rho0 == doctest::Approx(0.05).epsilon(1e-12));
        e.initial.u0 = 1.0;
        CHECK_THROWS_AS((void)resolve_initial_data(e), NegativeDensity);
    }
    SUBCASE("explicit off-shell u0 is rejected") {
        RunConfig e = c;
        e.initial.u0 = 5.0;
        CHECK_THROWS_AS((void)resolve_initial_data(e), DomainError);
    }
    SUBCASE("a0 <= 0") {
        RunConfig e = c;
        e.initial.a0 = -1.0;
        CHECK_THROWS_AS((void)resolve_initial_data(e), DomainError);
    }
    SUBCASE("no real branch") {
        RunConfig e = c;
        e.model.lambda = -30.0;
        CHECK_THROWS_AS((void)resolve_initial_data(e), NoRealBranch);
    }
}

TEST_CASE("output root environment variable") {
    ::unsetenv(kOutputRootEnv);
    CHECK(resolve_output_dir("runs/a") == std::filesystem::path("runs/a"));
    ::setenv(kOutputRootEnv, "/tmp/frw_root", 1);
    CHECK(resolve_output_dir("runs/a") == std::filesystem::path("/tmp/frw_root/runs/a"));
    CHECK(resolve_output_dir("/abs/dir") == std::filesystem::path("/abs/dir"));
    ::unsetenv(kOutputRootEnv);
}
