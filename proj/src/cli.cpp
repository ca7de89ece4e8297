#include "frwsim/cli.hpp"

#include <fstream>
#include <ostream>

#include "frwsim/config.hpp"
#include "frwsim/diagnostics.hpp"
#include "frwsim/error.hpp"
#include "frwsim/io.hpp"
#include "frwsim/sweep.hpp"

namespace frwsim::cli {
namespace fs = std::filesystem;

namespace {

bool any_exists(const fs::path& dir, std::initializer_list<const char*> names) {
    for (const char* n : names) {
        if (fs::exists(dir / n)) return true;
    }
    return false;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void write_summary(const Trajectory& traj, const VerificationReport& r, std::ostream& out) {
    out.precision(10);
    out << "FRW massive scalar field run\n"
        << "  lambda = " << traj.params.lambda << ", m = " << traj.params.mass << '\n'
        << "  a0 = " << traj.initial.a0 << ", u0 = " << traj.initial.u0
        << ", phi0 = " << traj.initial.phi0 << ", chi0 = " << traj.initial.chi0
        << ", rho0 = " << traj.initial.rho0 << '\n'
        << "  mode = " << to_string(traj.config.mode) << ", t_end = " << traj.config.t_end
        << ", samples = " << traj.samples.size() << '\n'
        << "  termination = " << to_string(traj.termination) << "\n\n";
    out << "nu = ";
    if (r.nu) out << *r.nu; else out << "undefined";
    out << "\nL_hat = " << r.L_hat << "\nH_inf_hat = " << r.H_inf_hat << "\nC0_hat = " << r.C0_hat
        << "\nmax |constraint| = " << r.max_constraint_drift << "\nQ resolution floor = "
        << r.q_floor << "\n\n";
    const auto rate = [&](const char* name, const FittedRate& f) {
        out << "rate(" << name << ") = ";
        if (f.fit) {
            out << f.fit->rate << "  on [" << f.t_lo << ", " << f.t_hi << "], rms " << f.fit->residual;
        } else {
            out << (f.vanished ? "vanished below resolution" : "not fitted");
        }
        out << '\n';
    };
    rate("Q", r.fitted_rates.Q);
    rate("rho", r.fitted_rates.rho);
    rate("chi^2", r.fitted_rates.chi2);
    if (r.nu) out << "3 nu = " << 3.0 * *r.nu << '\n';
    out << "\nchecks:\n";
    for (const auto& c : r.checks) {
        out << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << "  margin " << c.margin << '\n';
    }
    for (const auto& n : r.notes) out << "note: " << n << '\n';
    out << "\nstatus: " << to_string(r.status) << '\n';
}

int exit_for(Status s) {
    switch (s) {
        case Status::pass: return kOk;
        case Status::fail: return kVerificationFailure;
        case Status::inconclusive: return kInconclusive;
    }
    return kVerificationFailure;
}

}  // namespace

int cmd_simulate(const fs::path& config_path, const SimulateOptions& options, std::ostream& log) {
    RunConfig config;
    InitialData data;
    try {
        config = load_config(config_path);
        data = resolve_initial_data(config);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const NoRealBranch& e) {
        log << "inadmissible data: " << e.what() << '\n';
        return kInadmissible;
    } catch (const NegativeDensity& e) {
        log << "inadmissible data: " << e.what() << '\n';
        return kInadmissible;
    } catch (const DomainError& e) {
        log << "config error: " << e.what() << '\n';
        return kUsage;
    }

    const AdmissibilityReport adm = validate_theorem1(config.model, data);
    if (!adm.theorem1_applicable && !config.integrator.override_admissibility) {
        log << "inadmissible data: requires Lambda > -4 pi m^2 phi0^2, phi0 > 0, u0 > 0 "
               "(set override_admissibility = true to integrate anyway)\n";
        return kInadmissible;
    }

    const fs::path dir = options.out_dir ? *options.out_dir : resolve_output_dir(config.output.directory);
    const bool overwrite = options.overwrite || config.output.overwrite;
    if (!overwrite &&
        any_exists(dir, {"trajectory.csv", "derived.csv", "events.json", "meta.json"})) {
        log << "output exists in " << dir << "; pass --overwrite to replace it\n";
        return kUsage;
    }

    Trajectory traj;
    try {
        traj = integrate(data, config.model, config.integrator);
    } catch (const DomainError& e) {
        log << "config error: " << e.what() << '\n';
        return kUsage;
    }
    try {
        write_run(traj, dir, config.output.csv, config.output.json);
        if (config.output.plotdata) {
            const VerificationReport report = verify(traj);
            (void)write_plot_data(traj, report, dir / "plot");
        }
    } catch (const std::exception& e) {
        log << "I/O error: " << e.what() << '\n';
        return kUsage;
    }
    if (traj.termination != Termination::completed) {
        log << "integration stopped early: " << to_string(traj.termination) << '\n';
        for (const auto& e : traj.events) {
            if (e.kind == EventKind::GuardTripped) log << "  " << e.detail << '\n';
        }
        return kIntegratorFailure;
    }
    log << "wrote " << traj.samples.size() << " samples to " << dir.string() << '\n';
    return kOk;
}

int cmd_verify(const fs::path& run_dir, bool overwrite, std::ostream& log) {
    Trajectory traj;
    try {
        traj = read_run(run_dir);
    } catch (const std::exception& e) {
        log << "cannot load run: " << e.what() << '\n';
        return kUsage;
    }
    if (!overwrite && fs::exists(run_dir / "report.json")) {
        log << "report.json exists; pass --overwrite to replace it\n";
        return kUsage;
    }
    VerificationReport report;
    try {
        report = verify(traj);
        auto out = open_out(run_dir / "report.json");
        write_report_json(report, out);
    } catch (const std::exception& e) {
        log << "verification error: " << e.what() << '\n';
        return kUsage;
    }
    log << "status: " << to_string(report.status) << '\n';
    for (const auto& c : report.checks) {
        if (!c.pass) log << "  failed " << c.name << " (margin " << c.margin << ")\n";
    }
    for (const auto& n : report.notes) log << "  note: " << n << '\n';
    return exit_for(report.status);
}

int cmd_sweep(const fs::path& plan_path, const std::optional<fs::path>& out_dir, bool overwrite,
              std::ostream& log) {
    SweepPlan plan;
    try {
        plan = make_plan(load_config(plan_path));
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kUsage;
    }
    const fs::path dir = out_dir ? *out_dir : resolve_output_dir(plan.base.output.directory);
    if (!(overwrite || plan.base.output.overwrite) && fs::exists(dir / "sweep.csv")) {
        log << "sweep.csv exists in " << dir << "; pass --overwrite to replace it\n";
        return kUsage;
    }
    std::vector<SweepRow> rows;
    try {
        rows = run_sweep(plan);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kUsage;
    }
    try {
        fs::create_directories(dir);
        auto out = open_out(dir / "sweep.csv");
        write_sweep_csv(rows, out);
        auto timing = open_out(dir / "sweep_timing.csv");
        write_sweep_timing_csv(rows, timing);
    } catch (const std::exception& e) {
        log << "I/O error: " << e.what() << '\n';
        return kUsage;
    }
    log << "wrote " << rows.size() << " rows to " << (dir / "sweep.csv").string() << '\n';
    return kOk;
}

int cmd_report(const fs::path& run_dir, bool overwrite, std::ostream& log) {
    Trajectory traj;
    try {
        traj = read_run(run_dir);
    } catch (const std::exception& e) {
        log << "cannot load run: " << e.what() << '\n';
        return kUsage;
    }
    const fs::path dir = run_dir / "report";
    if (!overwrite && fs::exists(dir)) {
        log << dir << " exists; pass --overwrite to replace it\n";
        return kUsage;
    }
    try {
        const VerificationReport report = verify(traj);
        const int files = write_plot_data(traj, report, dir);
        auto out = open_out(dir / "summary.txt");
        write_summary(traj, report, out);
        log << "wrote summary.txt and " << files << " data files to " << dir.string() << '\n';
    } catch (const std::exception& e) {
        log << "report error: " << e.what() << '\n';
        return kUsage;
    }
    return kOk;
}

}  // namespace frwsim::cli
