#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include <doctest.h>

#include "frwsim/error.hpp"
#include "frwsim/sweep.hpp"

using namespace frwsim;

namespace {

RunConfig base_config() {
    RunConfig c;
    c.model = {1.0, 1.0};
    c.initial.phi0 = 1.0;
    c.initial.chi0 = 0.1;
    c.initial.rho0 = 0.05;
    return c;
}

std::string csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    write_sweep_csv(rows, out);
    return out.str();
}

using Key = std::tuple<double, double, double, double, double>;
Key key(const SweepRow& r) { return {r.lambda, r.mass, r.phi0, r.chi0, r.rho0}; }

}  // namespace

TEST_CASE("1x1 grid reproduces a single simulate + verify run") {
    const RunConfig base = base_config();
    const SweepPlan plan{base, SweepSpec{{{"lambda", {1.0}}}, 100, 1}};
    const auto rows = run_sweep(plan);
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].report);

    const InitialData d = resolve_initial_data(base);
    const VerificationReport direct = verify(integrate(d, base.model, base.integrator));
    const VerificationReport& swept = *rows[0].report;
    CHECK(rows[0].outcome == "ok");
    CHECK(rows[0].u0 == d.u0);
    CHECK(swept.checks == direct.checks);
    CHECK(swept.L_hat == direct.L_hat);
    CHECK(swept.H_inf_hat == direct.H_inf_hat);
    CHECK(swept.C0_hat == direct.C0_hat);
    CHECK(swept.max_constraint_drift == direct.max_constraint_drift);
    CHECK(swept.fitted_rates.Q.fit->rate == direct.fitted_rates.Q.fit->rate);
    CHECK(swept.status == Status::pass);

    const std::string table = csv(rows);
    CHECK(std::count(table.begin(), table.end(), '\n') == 2);
}

TEST_CASE("lambda axis straddling the admissibility threshold") {
    // Threshold -4 pi m^2 phi0^2 = -12.566...; -14 also has no real u0.
    const SweepPlan plan{base_config(), SweepSpec{{{"lambda", {-14.0, -13.0, -12.0, 0.0, 1.0}}}, 100, 0}};
    const auto rows = run_sweep(plan);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].outcome == "no_real_branch");
    CHECK(rows[1].outcome == "skipped");
    CHECK_FALSE(rows[1].admissible);
    for (std::size_t i = 2; i < rows.size(); ++i) {
        INFO("lambda = " << rows[i].lambda);
        CHECK(rows[i].admissible);
        CHECK(rows[i].outcome == "ok");
        REQUIRE(rows[i].report);
        CHECK(rows[i].report->status == Status::pass);
        // nu increases with lambda and matches its closed form.
        const double nu = std::sqrt((rows[i].lambda + 4.0 * kPi) / 3.0);
        CHECK(*rows[i].nu == doctest::Approx(nu).epsilon(1e-15));
        if (i > 2) CHECK(*rows[i].nu > *rows[i - 1].nu);
    }
}

TEST_CASE("override integrates inadmissible points instead of skipping") {
    RunConfig base = base_config();
    base.initial.branch = Branch::contracting;
    base.integrator.override_admissibility = true;
    const auto rows = run_sweep(SweepPlan{base, SweepSpec{{{"lambda", {1.0}}}, 100, 1}});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].outcome == "guard_tripped");
    CHECK(rows[0].events.find("GuardTripped@") != std::string::npos);
}

TEST_CASE("axis order permutes rows but not their contents") {
    RunConfig base = base_config();
    base.integrator.t_end = 4.0;
    const SweepAxis lam{"lambda", {0.0, 1.0, 2.0}};
    const SweepAxis rho{"rho0", {0.0, 0.1}};
    const auto a = run_sweep(SweepPlan{base, SweepSpec{{lam, rho}, 100, 0}});
    const auto b = run_sweep(SweepPlan{base, SweepSpec{{rho, lam}, 100, 0}});
    REQUIRE(a.size() == 6);
    REQUIRE(b.size() == 6);
    // Row-major: the last axis varies fastest.
    CHECK(a[0].lambda == 0.0);
    CHECK(a[1].lambda == 0.0);
    CHECK(a[1].rho0 == 0.1);
    CHECK(b[1].lambda == 1.0);

    std::map<Key, std::string> by_key;
    for (const auto& r : a) by_key[key(r)] = csv({r});
    for (const auto& r : b) CHECK(by_key.at(key(r)) == csv({r}));
}

TEST_CASE("table bytes are independent of thread count") {
    RunConfig base = base_config();
    base.integrator.t_end = 3.0;
    const std::vector<SweepAxis> axes{{"lambda", {0.0, 1.0, 2.0}}, {"phi0", {0.5, 1.0, 1.5}}};
    const std::string serial = csv(run_sweep(SweepPlan{base, SweepSpec{axes, 100, 1}}));
    const std::string parallel = csv(run_sweep(SweepPlan{base, SweepSpec{axes, 100, 4}}));
    CHECK(serial == parallel);
    CHECK(serial == csv(run_sweep(SweepPlan{base, SweepSpec{axes, 100, 4}})));
}

TEST_CASE("plan validation") {
    CHECK_THROWS_AS((void)make_plan(base_config()), ConfigError);
    CHECK_THROWS_AS((void)run_sweep(SweepPlan{base_config(), SweepSpec{{{"lambda", {}}}, 100, 1}}), ConfigError);
    CHECK_THROWS_AS((void)run_sweep(SweepPlan{base_config(), SweepSpec{{{"lambda", {1, 2, 3}}}, 2, 1}}), ConfigError);
}
