#include "frwsim/sweep.hpp"

#include <atomic>
#include <chrono>
#include <ostream>
#include <thread>

#include "frwsim/error.hpp"
#include "frwsim/io.hpp"

namespace frwsim {
namespace {

void set_axis(RunConfig& c, const std::string& name, double value) {
    if (name == "lambda") c.model.lambda = value;
    else if (name == "mass") c.model.mass = value;
    else if (name == "phi0") c.initial.phi0 = value;
    else if (name == "chi0") c.initial.chi0 = value;
    else if (name == "rho0") c.initial.rho0 = value;
    else throw ConfigError("unknown sweep axis '" + name + "'");
}

std::string optional_field(const std::optional<double>& x) {
    return x ? format_double(*x) : std::string();
}

std::string rate_field(const FittedRate& r) {
    if (r.fit) return format_double(r.fit->rate);
    return r.vanished ? "inf" : "";
}

}  // namespace

SweepPlan make_plan(const RunConfig& config) {
    if (!config.sweep) throw ConfigError("config has no [sweep] section");
    return SweepPlan{config, *config.sweep};
}

SweepRow run_point(const RunConfig& c) {
    const auto start = std::chrono::steady_clock::now();
    SweepRow row;
    row.lambda = c.model.lambda;
    row.mass = c.model.mass;
    row.phi0 = c.initial.phi0;
    row.chi0 = c.initial.chi0;
    row.rho0 = c.initial.rho0;

    const auto finish = [&]() -> SweepRow {
        row.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return row;
    };

    InitialData data;
    try {
        data = resolve_initial_data(c);
    } catch (const NoRealBranch& e) {
        row.outcome = "no_real_branch";
        row.message = e.what();
        return finish();
    } catch (const NegativeDensity& e) {
        row.outcome = "negative_density";
        row.message = e.what();
        return finish();
    } catch (const DomainError& e) {
        row.outcome = "invalid";
        row.message = e.what();
        return finish();
    }
    row.u0 = data.u0;
    row.rho0 = data.rho0;
    const AdmissibilityReport adm = validate_theorem1(c.model, data);
    row.admissible = adm.theorem1_applicable;
    row.nu = adm.nu;
    if (!adm.theorem1_applicable && !c.integrator.override_admissibility) {
        row.outcome = "skipped";
        row.message = "global-existence hypotheses fail";
        return finish();
    }

    const Trajectory traj = integrate(data, c.model, c.integrator);
    for (const auto& e : traj.events) {
        if (!row.events.empty()) row.events += ';';
        row.events += std::string(to_string(e.kind)) + "@" + format_double(e.t);
    }
    row.outcome = traj.termination == Termination::completed ? "ok"
                                                             : std::string(to_string(traj.termination));
    row.report = verify(traj);
    return finish();
}

std::vector<SweepRow> run_sweep(const SweepPlan& plan) {
    std::size_t total = 1;
    for (const auto& axis : plan.spec.axes) {
        if (axis.values.empty()) throw ConfigError("sweep axis '" + axis.name + "' is empty");
        total *= axis.values.size();
        if (total > plan.spec.cap) throw ConfigError("sweep grid exceeds cap");
    }

    std::vector<RunConfig> points(total, plan.base);
    for (std::size_t idx = 0; idx < total; ++idx) {
        // Row-major: the last declared axis varies fastest.
        std::size_t rem = idx;
        for (std::size_t k = plan.spec.axes.size(); k-- > 0;) {
            const auto& axis = plan.spec.axes[k];
            set_axis(points[idx], axis.name, axis.values[rem % axis.values.size()]);
            rem /= axis.values.size();
        }
    }

    std::vector<SweepRow> rows(total);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            try {
                rows[i] = run_point(points[i]);
            } catch (const std::exception& e) {
                rows[i] = SweepRow{};
                rows[i].lambda = points[i].model.lambda;
                rows[i].mass = points[i].model.mass;
                rows[i].phi0 = points[i].initial.phi0;
                rows[i].chi0 = points[i].initial.chi0;
                rows[i].rho0 = points[i].initial.rho0;
                rows[i].outcome = "invalid";
                rows[i].message = e.what();
            }
        }
    };
    unsigned threads = plan.spec.threads;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
    {
        std::vector<std::jthread> pool;
        for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
        worker();
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "lambda,mass,phi0,chi0,rho0,u0,admissible,outcome,nu,rate_Q,rate_rho,rate_chi2,"
           "L_hat,H_inf_hat,C0_hat,max_constraint_drift,verification,failed_checks,events\n";
    for (const auto& r : rows) {
        out << format_double(r.lambda) << ',' << format_double(r.mass) << ','
            << format_double(r.phi0) << ',' << format_double(r.chi0) << ','
            << format_double(r.rho0) << ',' << optional_field(r.u0) << ','
            << (r.admissible ? "true" : "false") << ',' << r.outcome << ','
            << optional_field(r.nu) << ',';
        if (r.report) {
            const auto& rep = *r.report;
            std::string failed;
            for (const auto& c : rep.checks) {
                if (c.pass) continue;
                if (!failed.empty()) failed += ';';
                failed += c.name;
            }
            out << rate_field(rep.fitted_rates.Q) << ',' << rate_field(rep.fitted_rates.rho) << ','
                << rate_field(rep.fitted_rates.chi2) << ',' << format_double(rep.L_hat) << ','
                << format_double(rep.H_inf_hat) << ',' << format_double(rep.C0_hat) << ','
                << format_double(rep.max_constraint_drift) << ',' << to_string(rep.status) << ','
                << failed << ',';
        } else {
            out << ",,,,,,,,,";
        }
        out << r.events << '\n';
    }
}

void write_sweep_timing_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "row,wall_seconds\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << i << ',' << format_double(rows[i].wall_seconds) << '\n';
    }
}

}  // namespace frwsim
