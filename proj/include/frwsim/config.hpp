#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "frwsim/initial_data.hpp"
#include "frwsim/integrator.hpp"
#include "frwsim/model.hpp"

namespace frwsim {

/// Environment variable naming the root for relative output directories.
inline constexpr const char* kOutputRootEnv = "FRWSIM_OUTPUT_ROOT";

struct InitialSpec {
    double a0 = 1.0;
    double phi0 = 0.0;
    double chi0 = 0.0;
    double rho0 = 0.0;
    Branch branch = Branch::expanding;
    /// Explicit Hubble variable; with solve_rho0 the density follows from
    /// the constraint, otherwise the given data must satisfy it.
    std::optional<double> u0;
    bool solve_rho0 = false;

    friend bool operator==(const InitialSpec&, const InitialSpec&) = default;
};

struct OutputSpec {
    std::string directory = "out";
    bool csv = true;
    bool json = true;
    bool plotdata = false;
    bool overwrite = false;

    friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct SweepAxis {
    std::string name;  // lambda, mass, phi0, chi0 or rho0
    std::vector<double> values;

    friend bool operator==(const SweepAxis&, const SweepAxis&) = default;
};

struct SweepSpec {
    std::vector<SweepAxis> axes;  // declaration order; first axis varies slowest
    std::size_t cap = 100000;
    unsigned threads = 0;  // 0 = hardware concurrency

    friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

/// Sectioned key = value configuration:
///
///   [model]       lambda, mass
///   [initial]     a0, phi0, chi0, rho0, branch, u0, solve_rho0
///   [integrator]  rel_tol, abs_tol, h_init, h_min, h_max, t_end, sample_dt,
///                 mode, max_abs_u, max_abs_phi, min_v, override_admissibility
///   [output]      directory, formats, overwrite
///   [sweep]       lambda | mass | phi0 | chi0 | rho0 = comma list, cap, threads
///
/// Unknown sections and keys, duplicates and non-finite numbers are errors.
struct RunConfig {
    ModelParams model;
    InitialSpec initial;
    IntegratorConfig integrator;
    OutputSpec output;
    std::optional<SweepSpec> sweep;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws ConfigError with the offending line number.
[[nodiscard]] RunConfig parse_config(std::string_view text);
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);
[[nodiscard]] std::string serialize_config(const RunConfig& config);

/// Builds constraint-consistent Cauchy data from the [initial] section.
/// Throws DomainError, NoRealBranch or NegativeDensity.
[[nodiscard]] InitialData resolve_initial_data(const RunConfig& config);

/// Output directory, prefixed by $FRWSIM_OUTPUT_ROOT when relative.
[[nodiscard]] std::filesystem::path resolve_output_dir(const std::string& directory);

}  // namespace frwsim
