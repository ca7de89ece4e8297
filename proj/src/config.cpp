#include "frwsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "frwsim/error.hpp"
#include "frwsim/io.hpp"

namespace frwsim {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = s.find(',');
        out.push_back(trim(s.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    RunConfig run() {
        std::size_t line_no = 0;
        std::string_view rest = text_;
        while (!rest.empty()) {
            const auto nl = rest.find('\n');
            std::string_view line = rest.substr(0, nl);
            rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
            ++line_no;
            line_ = line_no;
            if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) {
                line = line.substr(0, hash);
            }
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                open_section(line);
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) fail("expected key = value");
            const std::string key(trim(line.substr(0, eq)));
            const std::string_view value = trim(line.substr(eq + 1));
            if (key.empty()) fail("empty key");
            if (section_.empty()) fail("key '" + key + "' outside of any section");
            if (!seen_.insert(section_ + "." + key).second) {
                fail("duplicate key '" + key + "' in [" + section_ + "]");
            }
            assign(key, value);
        }
        finish();
        return cfg_;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("line " + std::to_string(line_) + ": " + what);
    }

    void open_section(std::string_view line) {
        if (line.back() != ']') fail("malformed section header");
        const std::string name(trim(line.substr(1, line.size() - 2)));
        static const std::set<std::string> known{"model", "initial", "integrator", "output",
                                                 "sweep"};
        if (!known.contains(name)) fail("unknown section [" + name + "]");
        if (!sections_.insert(name).second) fail("duplicate section [" + name + "]");
        section_ = name;
        if (name == "sweep") cfg_.sweep.emplace();
    }

    double number(std::string_view v) const {
        double x = 0.0;
        const char* end = v.data() + v.size();
        auto [ptr, ec] = std::from_chars(v.data(), end, x);
        if (ec != std::errc{} || ptr != end) fail("not a number: '" + std::string(v) + "'");
        if (!std::isfinite(x)) fail("non-finite number: '" + std::string(v) + "'");
        return x;
    }

    std::size_t count(std::string_view v) const {
        std::size_t x = 0;
        const char* end = v.data() + v.size();
        auto [ptr, ec] = std::from_chars(v.data(), end, x);
        if (ec != std::errc{} || ptr != end) fail("not a non-negative integer: '" + std::string(v) + "'");
        return x;
    }

    bool boolean(std::string_view v) const {
        if (v == "true") return true;
        if (v == "false") return false;
        fail("expected true or false, got '" + std::string(v) + "'");
    }

    void unknown(const std::string& key) const {
        fail("unknown key '" + key + "' in [" + section_ + "]");
    }

    void assign(const std::string& key, std::string_view v) {
        if (section_ == "model") {
            if (key == "lambda") cfg_.model.lambda = number(v);
            else if (key == "mass") cfg_.model.mass = number(v);
            else unknown(key);
        } else if (section_ == "initial") {
            auto& in = cfg_.initial;
            if (key == "a0") in.a0 = number(v);
            else if (key == "phi0") in.phi0 = number(v);
            else if (key == "chi0") in.chi0 = number(v);
            else if (key == "rho0") { in.rho0 = number(v); rho0_given_ = true; }
            else if (key == "u0") in.u0 = number(v);
            else if (key == "solve_rho0") in.solve_rho0 = boolean(v);
            else if (key == "branch") {
                if (v == "expanding") in.branch = Branch::expanding;
                else if (v == "contracting") in.branch = Branch::contracting;
                else fail("branch must be expanding or contracting");
            } else unknown(key);
        } else if (section_ == "integrator") {
            auto& ic = cfg_.integrator;
            if (key == "rel_tol") ic.rel_tol = number(v);
            else if (key == "abs_tol") ic.abs_tol = number(v);
            else if (key == "h_init") ic.h_init = number(v);
            else if (key == "h_min") ic.h_min = number(v);
            else if (key == "h_max") ic.h_max = number(v);
            else if (key == "t_end") ic.t_end = number(v);
            else if (key == "sample_dt") ic.sample_dt = number(v);
            else if (key == "max_abs_u") ic.guards.max_abs_u = number(v);
            else if (key == "max_abs_phi") ic.guards.max_abs_phi = number(v);
            else if (key == "min_v") ic.guards.min_v = number(v);
            else if (key == "override_admissibility") ic.override_admissibility = boolean(v);
            else if (key == "mode") {
                const auto m = parse_mode(v);
                if (!m) fail("mode must be paper or kg");
                ic.mode = *m;
            } else unknown(key);
        } else if (section_ == "output") {
            auto& out = cfg_.output;
            if (key == "directory") {
                if (v.empty()) fail("empty output directory");
                out.directory = std::string(v);
            } else if (key == "overwrite") out.overwrite = boolean(v);
            else if (key == "formats") {
                out.csv = out.json = out.plotdata = false;
                for (auto f : split_list(v)) {
                    if (f == "csv") out.csv = true;
                    else if (f == "json") out.json = true;
                    else if (f == "plotdata") out.plotdata = true;
                    else fail("unknown format '" + std::string(f) + "'");
                }
            } else unknown(key);
        } else if (section_ == "sweep") {
            auto& sw = *cfg_.sweep;
            if (key == "cap") sw.cap = count(v);
            else if (key == "threads") sw.threads = static_cast<unsigned>(count(v));
            else if (key == "lambda" || key == "mass" || key == "phi0" || key == "chi0" ||
                     key == "rho0") {
                SweepAxis axis{key, {}};
                for (auto item : split_list(v)) axis.values.push_back(number(item));
                sw.axes.push_back(std::move(axis));
            } else unknown(key);
        }
    }

    void finish() {
        line_ = 0;
        if (cfg_.initial.solve_rho0 && !cfg_.initial.u0) {
            throw ConfigError("solve_rho0 requires an explicit u0");
        }
        if (cfg_.initial.solve_rho0 && rho0_given_) {
            throw ConfigError("rho0 cannot be given together with solve_rho0 = true");
        }
        if (cfg_.model.mass < 0.0) throw ConfigError("mass must be >= 0");
        try {
            validate(cfg_.integrator);
        } catch (const DomainError& e) {
            throw ConfigError(std::string("[integrator] ") + e.what());
        }
        if (cfg_.sweep) {
            std::size_t size = 1;
            if (cfg_.sweep->axes.empty()) throw ConfigError("[sweep] declares no axes");
            for (const auto& axis : cfg_.sweep->axes) {
                size *= axis.values.size();
                if (size > cfg_.sweep->cap) {
                    throw ConfigError("sweep grid exceeds cap of " + std::to_string(cfg_.sweep->cap));
                }
            }
        }
    }

    std::string_view text_;
    RunConfig cfg_;
    std::string section_;
    std::set<std::string> sections_;
    std::set<std::string> seen_;
    std::size_t line_ = 0;
    bool rho0_given_ = false;
};

}  // namespace

RunConfig parse_config(std::string_view text) { return Parser(text).run(); }

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream out;
    const auto kv = [&](const char* key, double x) { out << key << " = " << format_double(x) << '\n'; };
    const auto kb = [&](const char* key, bool b) { out << key << " = " << (b ? "true" : "false") << '\n'; };

    out << "[model]\n";
    kv("lambda", c.model.lambda);
    kv("mass", c.model.mass);

    out << "\n[initial]\n";
    kv("a0", c.initial.a0);
    kv("phi0", c.initial.phi0);
    kv("chi0", c.initial.chi0);
    if (!c.initial.solve_rho0) kv("rho0", c.initial.rho0);
    out << "branch = " << (c.initial.branch == Branch::expanding ? "expanding" : "contracting")
        << '\n';
    if (c.initial.u0) kv("u0", *c.initial.u0);
    kb("solve_rho0", c.initial.solve_rho0);

    const auto& ic = c.integrator;
    out << "\n[integrator]\n";
    kv("rel_tol", ic.rel_tol);
    kv("abs_tol", ic.abs_tol);
    kv("h_init", ic.h_init);
    kv("h_min", ic.h_min);
    kv("h_max", ic.h_max);
    kv("t_end", ic.t_end);
    kv("sample_dt", ic.sample_dt);
    out << "mode = " << to_string(ic.mode) << '\n';
    kv("max_abs_u", ic.guards.max_abs_u);
    kv("max_abs_phi", ic.guards.max_abs_phi);
    kv("min_v", ic.guards.min_v);
    kb("override_admissibility", ic.override_admissibility);

    out << "\n[output]\n";
    out << "directory = " << c.output.directory << '\n';
    std::vector<std::string> formats;
    if (c.output.csv) formats.emplace_back("csv");
    if (c.output.json) formats.emplace_back("json");
    if (c.output.plotdata) formats.emplace_back("plotdata");
    out << "formats = ";
    for (std::size_t i = 0; i < formats.size(); ++i) out << (i ? "," : "") << formats[i];
    out << '\n';
    kb("overwrite", c.output.overwrite);

    if (c.sweep) {
        out << "\n[sweep]\n";
        for (const auto& axis : c.sweep->axes) {
            out << axis.name << " = ";
            for (std::size_t i = 0; i < axis.values.size(); ++i) {
                out << (i ? ", " : "") << format_double(axis.values[i]);
            }
            out << '\n';
        }
        out << "cap = " << c.sweep->cap << '\n';
        out << "threads = " << c.sweep->threads << '\n';
    }
    return out.str();
}

InitialData resolve_initial_data(const RunConfig& c) {
    const InitialSpec& in = c.initial;
    InitialData d;
    d.a0 = in.a0;
    d.phi0 = in.phi0;
    d.chi0 = in.chi0;
    if (in.u0 && in.solve_rho0) {
        d.u0 = *in.u0;
        d.rho0 = solve_rho0(c.model, d.u0, d.phi0, d.chi0);
    } else if (in.u0) {
        d.u0 = *in.u0;
        d.rho0 = in.rho0;
    } else {
        d.rho0 = in.rho0;
        d.u0 = solve_u0(c.model, d.phi0, d.chi0, d.rho0, in.branch).u0;
    }
    validate(d, c.model);
    return d;
}

std::filesystem::path resolve_output_dir(const std::string& directory) {
    std::filesystem::path p(directory);
    if (p.is_relative()) {
        if (const char* root = std::getenv(kOutputRootEnv); root && *root) {
            return std::filesystem::path(root) / p;
        }
    }
    return p;
}

}  // namespace frwsim
