#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plsgd/problems.hpp"
#include "plsgd/sgd.hpp"

namespace plsgd::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitVerificationFailure = 2;
inline constexpr int kExitDivergence = 3;
inline constexpr int kExitNumericalFailure = 4;

// Parsed flat key=value experiment configuration (fail-fast on unknown keys).
struct Config {
    ProblemKind kind = ProblemKind::least_squares;
    int n = 0;
    int d = 0;
    std::uint64_t problem_seed = 0;
    std::optional<int> k;
    std::optional<int> rank;
    std::optional<double> c;

    int m = 1;
    EtaRule eta_rule = EtaRule::quadratic_opt;
    int steps = 0;
    int runs = 1;
    std::uint64_t sgd_seed = 0;
    std::optional<double> eta;

    int probes_count = 1000;
    std::uint64_t probes_seed = 1;
    std::optional<double> verify_alpha_scale;

    std::string output_path;
};

Config parse_config(const std::string& path);

ProblemInstance build_problem(const Config& config);

// Step size resolved per eta_rule plus both Theorem-1-family variants and
// their per-step factors, computed from the instance's analytic constants.
struct ResolvedStep {
    double eta_used = 0.0;
    double eta_theorem1 = 0.0;
    double eta_quadratic = 0.0;
    double factor_theorem1 = 0.0;  // Eq.-style factor at eta_theorem1
    double factor_quadratic = 0.0; // factor at eta_quadratic (= 1 - alpha eta / 2)
    double factor_used = 0.0;      // factor at eta_used; drives the bound comparison
};

ResolvedStep resolve_step(const ProblemInstance& inst, const Config& config, int m);

int cmd_run(const std::string& config_path);
int cmd_verify(const std::string& config_path);
int cmd_sweep(const std::string& config_path, const std::vector<int>& batch_sizes);

}  // namespace plsgd::cli
