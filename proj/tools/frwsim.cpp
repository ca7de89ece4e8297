#include <iostream>

#include <CLI11.hpp>

#include "frwsim/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Flat FRW cosmology with a massive scalar field, perfect fluid and Lambda"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir;
    bool overwrite = false;

    auto* simulate = app.add_subcommand("simulate", "integrate a run config");
    simulate->add_option("config", config, "run config file")->required()->check(CLI::ExistingFile);
    simulate->add_option("-o,--out", out_dir, "output directory (overrides the config)");
    simulate->add_flag("--overwrite", overwrite, "replace existing output");

    std::string run_dir;
    auto* verify = app.add_subcommand("verify", "check bounds and late-time limits of a run");
    verify->add_option("run_dir", run_dir, "directory written by simulate")->required();
    verify->add_flag("--overwrite", overwrite, "replace an existing report.json");

    auto* sweep = app.add_subcommand("sweep", "run a parameter grid");
    sweep->add_option("plan", config, "config with a [sweep] section")->required()->check(CLI::ExistingFile);
    sweep->add_option("-o,--out", out_dir, "output directory (overrides the config)");
    sweep->add_flag("--overwrite", overwrite, "replace an existing sweep.csv");

    auto* report = app.add_subcommand("report", "text summary and gnuplot data for a run");
    report->add_option("run_dir", run_dir, "directory written by simulate")->required();
    report->add_flag("--overwrite", overwrite, "replace an existing report directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : frwsim::cli::kUsage;
    }

    namespace cli = frwsim::cli;
    std::optional<std::filesystem::path> out;
    if (!out_dir.empty()) out = out_dir;
    if (*simulate) return cli::cmd_simulate(config, {out, overwrite}, std::cerr);
    if (*verify) return cli::cmd_verify(run_dir, overwrite, std::cerr);
    if (*sweep) return cli::cmd_sweep(config, out, overwrite, std::cerr);
    if (*report) return cli::cmd_report(run_dir, overwrite, std::cerr);
    return cli::kUsage;
}
