#include "frwsim/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace frwsim {

using nlohmann::json;

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

json optional_number(const std::optional<double>& x) {
    return x ? json(*x) : json(nullptr);
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed " + path.string() + ": " + e.what());
    }
}

double parse_field(std::string_view s, const std::string& where) {
    double x = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, x);
    if (ec != std::errc{} || ptr != end) throw std::runtime_error("bad number in " + where);
    return x;
}

json fit_json(const FittedRate& r) {
    json j;
    j["rate"] = r.fit ? json(r.fit->rate) : json(nullptr);
    j["intercept"] = r.fit ? json(r.fit->intercept) : json(nullptr);
    j["residual"] = r.fit ? json(r.fit->residual) : json(nullptr);
    j["points"] = r.fit ? r.fit->points : 0;
    j["t_lo"] = r.t_lo;
    j["t_hi"] = r.t_hi;
    j["vanished"] = r.vanished;
    return j;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    out << kTrajectoryHeader << '\n';
    for (const auto& x : traj.samples) {
        const auto& s = x.state;
        const auto& d = x.derived;
        for (double v : {s.t, s.u, s.v, scale_factor(s), s.phi, s.chi, s.psi(), s.rho, d.H, d.T00,
                         d.Q}) {
            out << format_double(v) << ',';
        }
        out << format_double(d.constraint) << '\n';
    }
}

void write_derived_csv(const Trajectory& traj, std::ostream& out) {
    out << kDerivedHeader << '\n';
    for (const auto& x : traj.samples) {
        const auto& d = x.derived;
        out << format_double(x.state.t) << ',' << format_double(scale_factor(x.state)) << ','
            << format_double(d.H) << ',' << format_double(d.T00) << ',' << format_double(d.Q)
            << ',' << format_double(d.constraint) << ','
            << format_double(d.Q - 24.0 * kPi * x.state.rho) << '\n';
    }
}

void write_events_json(const Trajectory& traj, std::ostream& out) {
    json events = json::array();
    for (const auto& e : traj.events) {
        events.push_back({{"t", e.t}, {"kind", std::string(to_string(e.kind))}, {"detail", e.detail}});
    }
    out << events.dump(2) << '\n';
}

void write_meta_json(const Trajectory& traj, std::ostream& out) {
    const auto& c = traj.config;
    const AdmissibilityReport adm = validate_theorem1(traj.params, traj.initial);
    json j;
    j["params"] = {{"lambda", traj.params.lambda}, {"mass", traj.params.mass}};
    j["initial"] = {{"a0", traj.initial.a0},     {"u0", traj.initial.u0},
                    {"b0", traj.initial.b0()},   {"phi0", traj.initial.phi0},
                    {"chi0", traj.initial.chi0}, {"rho0", traj.initial.rho0}};
    j["integrator"] = {{"rel_tol", c.rel_tol},
                       {"abs_tol", c.abs_tol},
                       {"h_init", c.h_init},
                       {"h_min", c.h_min},
                       {"h_max", c.h_max},
                       {"t_end", c.t_end},
                       {"sample_dt", c.sample_dt},
                       {"mode", std::string(to_string(c.mode))},
                       {"max_abs_u", c.guards.max_abs_u},
                       {"max_abs_phi", c.guards.max_abs_phi},
                       {"min_v", c.guards.min_v},
                       {"override_admissibility", c.override_admissibility}};
    j["admissibility"] = {{"lambda_bound_ok", adm.lambda_bound_ok},
                          {"phi0_positive", adm.phi0_positive},
                          {"u0_positive", adm.u0_positive},
                          {"chi0_nonneg", adm.chi0_nonneg},
                          {"rho0_nonneg", adm.rho0_nonneg},
                          {"theorem1_applicable", adm.theorem1_applicable},
                          {"nu", optional_number(adm.nu)}};
    j["stats"] = {{"accepted", traj.stats.accepted},
                  {"rejected", traj.stats.rejected},
                  {"rhs_evals", traj.stats.rhs_evals}};
    j["termination"] = std::string(to_string(traj.termination));
    j["samples"] = traj.samples.size();
    out << j.dump(2) << '\n';
}

void write_report_json(const VerificationReport& r, std::ostream& out) {
    json j;
    j["nu"] = optional_number(r.nu);
    json checks = json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"margin", c.margin}});
    }
    j["checks"] = checks;
    const auto rate = [](const FittedRate& f) {
        return f.fit ? json(f.fit->rate) : json(nullptr);
    };
    j["fitted_rates"] = {{"Q", rate(r.fitted_rates.Q)},
                         {"rho", rate(r.fitted_rates.rho)},
                         {"chi2", rate(r.fitted_rates.chi2)}};
    j["fit_details"] = {{"Q", fit_json(r.fitted_rates.Q)},
                        {"rho", fit_json(r.fitted_rates.rho)},
                        {"chi2", fit_json(r.fitted_rates.chi2)}};
    j["L_hat"] = r.L_hat;
    j["H_inf_hat"] = r.H_inf_hat;
    j["C0_hat"] = r.C0_hat;
    j["a_growth_ok"] = r.a_growth_ok;
    j["max_constraint_drift"] = r.max_constraint_drift;
    j["q_floor"] = r.q_floor;
    j["status"] = std::string(to_string(r.status));
    j["notes"] = r.notes;
    const auto& t = r.tolerances;
    j["tolerances"] = {{"envelope", t.envelope},     {"rate", t.rate},
                       {"H_limit", t.H_limit},       {"T00_limit", t.T00_limit},
                       {"growth", t.growth},         {"constraint", t.constraint},
                       {"quadrature", t.quadrature}, {"identity", t.identity},
                       {"gate", t.gate}};
    out << j.dump(2) << '\n';
}

void write_run(const Trajectory& traj, const std::filesystem::path& dir, bool csv, bool json_out) {
    std::filesystem::create_directories(dir);
    if (csv) {
        auto t = open_out(dir / "trajectory.csv");
        write_trajectory_csv(traj, t);
        auto d = open_out(dir / "derived.csv");
        write_derived_csv(traj, d);
    }
    if (json_out) {
        auto e = open_out(dir / "events.json");
        write_events_json(traj, e);
        auto m = open_out(dir / "meta.json");
        write_meta_json(traj, m);
    }
}

Trajectory read_run(const std::filesystem::path& dir) {
    Trajectory traj;
    const json meta = read_json(dir / "meta.json");
    const json events = read_json(dir / "events.json");
    try {
        traj.params.lambda = meta.at("params").at("lambda").get<double>();
        traj.params.mass = meta.at("params").at("mass").get<double>();
        const auto& in = meta.at("initial");
        traj.initial = InitialData{in.at("a0").get<double>(), in.at("u0").get<double>(),
                                   in.at("phi0").get<double>(), in.at("chi0").get<double>(),
                                   in.at("rho0").get<double>()};
        const auto& ic = meta.at("integrator");
        auto& c = traj.config;
        c.rel_tol = ic.at("rel_tol").get<double>();
        c.abs_tol = ic.at("abs_tol").get<double>();
        c.h_init = ic.at("h_init").get<double>();
        c.h_min = ic.at("h_min").get<double>();
        c.h_max = ic.at("h_max").get<double>();
        c.t_end = ic.at("t_end").get<double>();
        c.sample_dt = ic.at("sample_dt").get<double>();
        const auto mode = parse_mode(ic.at("mode").get<std::string>());
        if (!mode) throw std::runtime_error("unknown mode in meta.json");
        c.mode = *mode;
        c.guards.max_abs_u = ic.at("max_abs_u").get<double>();
        c.guards.max_abs_phi = ic.at("max_abs_phi").get<double>();
        c.guards.min_v = ic.at("min_v").get<double>();
        c.override_admissibility = ic.at("override_admissibility").get<bool>();
        const auto& st = meta.at("stats");
        traj.stats = {st.at("accepted").get<std::size_t>(), st.at("rejected").get<std::size_t>(),
                      st.at("rhs_evals").get<std::size_t>()};
        const auto term = parse_termination(meta.at("termination").get<std::string>());
        if (!term) throw std::runtime_error("unknown termination in meta.json");
        traj.termination = *term;
        for (const auto& e : events) {
            const auto kind = parse_event_kind(e.at("kind").get<std::string>());
            if (!kind) throw std::runtime_error("unknown event kind in events.json");
            traj.events.push_back({e.at("t").get<double>(), *kind, e.at("detail").get<std::string>()});
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed run metadata: ") + e.what());
    }

    const auto csv_path = dir / "trajectory.csv";
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + csv_path.string());
    std::string line;
    if (!std::getline(in, line) || line != kTrajectoryHeader) {
        throw std::runtime_error("trajectory.csv has an unexpected header");
    }
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::vector<double> f;
        std::string_view rest = line;
        const std::string where = "trajectory.csv row " + std::to_string(row);
        while (true) {
            const auto comma = rest.find(',');
            f.push_back(parse_field(rest.substr(0, comma), where));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (f.size() != 12) throw std::runtime_error(where + " has " + std::to_string(f.size()) + " fields");
        const CosmoState s{f[0], f[1], f[2], f[4], f[5], f[7]};
        traj.samples.push_back(Sample{s, derived(s, traj.params)});
    }
    if (traj.samples.empty()) throw std::runtime_error("trajectory.csv holds no samples");
    return traj;
}

int write_plot_data(const Trajectory& traj, const VerificationReport& report,
                    const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    using Getter = std::function<double(const Sample&)>;
    const std::vector<std::pair<std::string, Getter>> series{
        {"u", [](const Sample& x) { return x.state.u; }},
        {"a", [](const Sample& x) { return scale_factor(x.state); }},
        {"phi", [](const Sample& x) { return x.state.phi; }},
        {"chi", [](const Sample& x) { return x.state.chi; }},
        {"rho", [](const Sample& x) { return x.state.rho; }},
        {"H", [](const Sample& x) { return x.derived.H; }},
        {"T00", [](const Sample& x) { return x.derived.T00; }},
        {"Q", [](const Sample& x) { return x.derived.Q; }},
        {"constraint", [](const Sample& x) { return x.derived.constraint; }},
    };
    int written = 0;
    for (const auto& [name, get] : series) {
        auto out = open_out(dir / (name + "_vs_t.dat"));
        out << "# t " << name << '\n';
        for (const auto& x : traj.samples) {
            out << format_double(x.state.t) << ' ' << format_double(get(x)) << '\n';
        }
        ++written;
    }
    // ln Q restricted to the samples that entered the rate fit.
    auto out = open_out(dir / "lnQ_vs_t.dat");
    out << "# t lnQ (fit window)\n";
    const auto& fq = report.fitted_rates.Q;
    if (fq.fit) {
        for (const auto& x : traj.samples) {
            if (x.state.t < fq.t_lo || x.state.t > fq.t_hi) continue;
            out << format_double(x.state.t) << ' ' << format_double(std::log(x.derived.Q)) << '\n';
        }
    }
    return written + 1;
}

}  // namespace frwsim
