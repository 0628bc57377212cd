#include <CLI11.hpp>

#include <string>
#include <vector>

#include "plsgd/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Mini-batch SGD convergence experiments for interpolated PL objectives"};
    app.require_subcommand(1);

    std::string run_config;
    auto* run = app.add_subcommand("run", "run SGD trajectories and write a curve CSV");
    run->add_option("config", run_config, "experiment config file")->required();

    std::string verify_config;
    auto* verify = app.add_subcommand("verify", "run the invariant suite for an instance");
    verify->add_option("config", verify_config, "experiment config file")->required();

    std::string sweep_config;
    std::vector<int> batch_sizes;
    auto* sweep = app.add_subcommand("sweep", "sweep batch sizes and write a per-m CSV");
    sweep->add_option("config", sweep_config, "experiment config file")->required();
    sweep->add_option("-m,--batch-sizes", batch_sizes, "batch sizes to sweep")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return plsgd::cli::cmd_run(run_config);
    if (verify->parsed()) return plsgd::cli::cmd_verify(verify_config);
    if (sweep->parsed()) return plsgd::cli::cmd_sweep(sweep_config, batch_sizes);
    return plsgd::cli::kExitConfigError;
}
