#include "plsgd/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "plsgd/errors.hpp"
#include "plsgd/oracle.hpp"

namespace plsgd::cli {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

// 17 significant digits: doubles round-trip exactly through the CSV.
std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has non-integer value '" + value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has non-numeric value '" + value + "'");
    }
}

ProblemKind parse_kind(const std::string& value) {
    if (value == "least_squares") return ProblemKind::least_squares;
    if (value == "composed_linear") return ProblemKind::composed_linear;
    if (value == "composed_nonlinear") return ProblemKind::composed_nonlinear;
    throw ConfigError("config: unknown problem.kind '" + value + "'");
}

EtaRule parse_eta_rule(const std::string& value) {
    if (value == "explicit") return EtaRule::explicit_value;
    if (value == "theorem1") return EtaRule::theorem1;
    if (value == "quadratic_opt") return EtaRule::quadratic_opt;
    if (value == "theorem2") return EtaRule::theorem2;
    if (value == "corollary") return EtaRule::corollary;
    throw ConfigError("config: unknown sgd.eta_rule '" + value + "'");
}

Vector unit_gaussian(Index dim, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(dim);
    for (Index i = 0; i < dim; ++i) v(i) = gauss(rng);
    v.normalize();
    return v;
}

struct RunOutcome {
    Trajectory traj;                              // surviving runs only
    std::vector<std::pair<int, int>> diverged;    // (run, step)
    int completed = 0;
};

RunOutcome execute_runs(const ErmObjective& obj, const Vector& w0, double eta, int m, int steps,
                        int runs, std::uint64_t seed) {
    RunOutcome out;
    for (int r = 0; r < runs; ++r) {
        Rng rng = make_stream(seed, static_cast<std::uint64_t>(r));
        try {
            Vector w_final;
            out.traj.losses.push_back(run_sgd_single(obj, w0, eta, m, steps, rng, w_final, r));
            out.traj.final_params.push_back(std::move(w_final));
            ++out.completed;
        } catch (const DivergenceError& e) {
            out.diverged.emplace_back(e.run, e.step);
        }
    }
    if (out.completed > 0) aggregate_runs(out.traj);
    return out;
}

}  // namespace

Config parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");

    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: line " + std::to_string(line_no) + " is not key = value");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (kv.count(key)) {
            throw ConfigError("config: duplicate key '" + key + "' at line " +
                              std::to_string(line_no));
        }
        kv[key] = value;
    }

    Config config;
    const auto take = [&kv](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    const auto require = [&take](const std::string& key) {
        auto v = take(key);
        if (!v) throw ConfigError("config: missing required key '" + key + "'");
        return *v;
    };

    config.kind = parse_kind(require("problem.kind"));
    config.n = parse_int("problem.n", require("problem.n"));
    config.d = parse_int("problem.d", require("problem.d"));
    config.problem_seed =
        static_cast<std::uint64_t>(parse_int("problem.seed", require("problem.seed")));
    if (auto v = take("problem.k")) config.k = parse_int("problem.k", *v);
    if (auto v = take("problem.rank")) config.rank = parse_int("problem.rank", *v);
    if (auto v = take("problem.c")) config.c = parse_double("problem.c", *v);

    config.m = parse_int("sgd.m", require("sgd.m"));
    config.eta_rule = parse_eta_rule(require("sgd.eta_rule"));
    config.steps = parse_int("sgd.steps", require("sgd.steps"));
    config.runs = parse_int("sgd.runs", require("sgd.runs"));
    config.sgd_seed = static_cast<std::uint64_t>(parse_int("sgd.seed", require("sgd.seed")));
    if (auto v = take("sgd.eta")) config.eta = parse_double("sgd.eta", *v);

    if (auto v = take("probes.count")) config.probes_count = parse_int("probes.count", *v);
    if (auto v = take("probes.seed")) {
        config.probes_seed = static_cast<std::uint64_t>(parse_int("probes.seed", *v));
    }
    if (auto v = take("verify.alpha_scale")) {
        config.verify_alpha_scale = parse_double("verify.alpha_scale", *v);
    }

    config.output_path = require("output.path");

    if (!kv.empty()) {
        throw ConfigError("config: unknown key '" + kv.begin()->first + "'");
    }
    if (config.eta_rule == EtaRule::explicit_value && !config.eta) {
        throw ConfigError("config: sgd.eta is required when sgd.eta_rule = explicit");
    }
    return config;
}

ProblemInstance build_problem(const Config& config) {
    switch (config.kind) {
        case ProblemKind::least_squares:
            return gen_interpolated_least_squares(config.n, config.d, config.problem_seed);
        case ProblemKind::composed_linear: {
            if (!config.k || !config.rank) {
                throw ConfigError("config: composed_linear requires problem.k and problem.rank");
            }
            return gen_composed_linear(config.n, config.d, *config.k, *config.rank,
                                       config.problem_seed);
        }
        case ProblemKind::composed_nonlinear: {
            if (!config.c) {
                throw ConfigError("config: composed_nonlinear requires problem.c");
            }
            const ProblemInstance base =
                gen_interpolated_least_squares(config.n, config.d, config.problem_seed);
            return gen_composed_nonlinear(base, *config.c);
        }
    }
    throw ConfigError("config: unreachable problem kind");
}

ResolvedStep resolve_step(const ProblemInstance& inst, const Config& config, int m) {
    const ConstantsReport& cs = inst.constants;
    ResolvedStep step;
    step.eta_theorem1 = step_size_theorem1(cs.alpha, cs.beta, cs.lambda, m);
    step.eta_quadratic = step_size_quadratic_opt(cs.alpha, cs.beta, cs.lambda, m);
    step.factor_theorem1 = contraction_factor(step.eta_theorem1, cs.alpha, cs.beta, cs.lambda, m);
    step.factor_quadratic = contraction_factor(step.eta_quadratic, cs.alpha, cs.beta, cs.lambda, m);

    switch (config.eta_rule) {
        case EtaRule::explicit_value:
            step.eta_used = *config.eta;
            if (!(step.eta_used > 0.0)) {
                throw ConfigError("config: explicit sgd.eta must be positive");
            }
            if (step.eta_used > 2.0 / cs.lambda) {
                throw PreconditionViolationError(
                    "cmd_run: explicit eta exceeds 2/lambda; the contraction bound is undefined");
            }
            step.factor_used = contraction_factor(step.eta_used, cs.alpha, cs.beta, cs.lambda, m);
            break;
        case EtaRule::theorem1:
            step.eta_used = step.eta_theorem1;
            step.factor_used = step.factor_theorem1;
            break;
        case EtaRule::quadratic_opt:
            step.eta_used = step.eta_quadratic;
            step.factor_used = step.factor_quadratic;
            break;
        case EtaRule::theorem2: {
            if (inst.kind != ProblemKind::composed_linear || !inst.linmap) {
                throw ConfigError("config: eta_rule theorem2 requires problem.kind composed_linear");
            }
            const auto& p = *inst.linmap;
            step.eta_used = step_size_theorem2(p.tilde_beta, p.tilde_lambda,
                                               p.factorization.sigma_max, m);
            step.factor_used = theorem2_rate_factor(p.tilde_alpha,
                                                    p.factorization.sigma_min_nonzero,
                                                    step.eta_used);
            break;
        }
        case EtaRule::corollary: {
            if (inst.kind != ProblemKind::composed_nonlinear || !inst.base || !inst.transform) {
                throw ConfigError(
                    "config: eta_rule corollary requires problem.kind composed_nonlinear");
            }
            const ConstantsReport& base = inst.base->constants;
            const double eta_q_base =
                step_size_quadratic_opt(base.alpha, base.beta, base.lambda, m);
            step.eta_used = step_size_corollary(eta_q_base, inst.transform->a, inst.transform->b);
            step.factor_used = corollary_bound_factor(base.alpha, eta_q_base, inst.transform->a,
                                                      inst.transform->b);
            break;
        }
    }
    return step;
}

int cmd_run(const std::string& config_path) {
    Config config;
    ProblemInstance inst;
    ResolvedStep step;
    try {
        config = parse_config(config_path);
        inst = build_problem(config);
        step = resolve_step(inst, config, config.m);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfigError;
    } catch (const InvalidInputError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfigError;
    } catch (const PreconditionViolationError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfigError;
    } catch (const NumericalFailureError& e) {
        std::cerr << e.what() << "\n";
        return kExitNumericalFailure;
    }

    const ErmObjective& obj = *inst.objective;
    Rng w0_rng = make_stream(config.sgd_seed, ~std::uint64_t{0});
    const Vector w0 = unit_gaussian(obj.dim(), w0_rng);
    const double l0 = obj.value(w0);

    const RunOutcome outcome = execute_runs(obj, w0, step.eta_used, config.m, config.steps,
                                            config.runs, config.sgd_seed);

    // Theoretical curves. For the theorem2 rule the bound lives on projected
    // distances, so the loss curve carries the lambda sigma_max^2 / 2 prefactor.
    std::vector<double> bound_theorem;
    std::vector<double> bound_quadratic;
    if (config.eta_rule == EtaRule::theorem2) {
        const auto& p = *inst.linmap;
        const double d0 = numerics::project_range_pinv(p.factorization, w0 - p.w_star).squaredNorm();
        const double prefactor =
            p.tilde_lambda * p.factorization.sigma_max * p.factorization.sigma_max / 2.0;
        bound_quadratic = theoretical_bound_curve(prefactor * d0, step.factor_used, config.steps);
        bound_theorem = bound_quadratic;
    } else if (config.eta_rule == EtaRule::corollary) {
        const ConstantsReport& base = inst.base->constants;
        const double eta_t1_base =
            step_size_theorem1(base.alpha, base.beta, base.lambda, config.m);
        const double factor_t1 = corollary_bound_factor(base.alpha, eta_t1_base,
                                                        inst.transform->a, inst.transform->b);
        bound_theorem = theoretical_bound_curve(l0, factor_t1, config.steps);
        bound_quadratic = theoretical_bound_curve(l0, step.factor_used, config.steps);
    } else {
        bound_theorem = theoretical_bound_curve(l0, step.factor_theorem1, config.steps);
        bound_quadratic = theoretical_bound_curve(l0, step.factor_used, config.steps);
    }

    // Statistical bound comparison: mean loss under the factor_used curve with
    // three relative standard errors of slack at every recorded step.
    bool bound_pass = outcome.completed > 0;
    if (outcome.completed > 0) {
        for (std::size_t t = 0; t < outcome.traj.mean_loss.size(); ++t) {
            const double mean = outcome.traj.mean_loss[t];
            const double rel_se = mean > 0.0 ? outcome.traj.std_err[t] / mean : 0.0;
            if (mean > bound_quadratic[t] * (1.0 + 3.0 * rel_se) + 1e-12 * l0) {
                bound_pass = false;
                break;
            }
        }
    }

    if (outcome.completed > 0) {
        std::ofstream csv(config.output_path);
        if (!csv) {
            std::cerr << "cmd_run: cannot write '" << config.output_path << "'\n";
            return kExitConfigError;
        }
        csv << "step,mean_loss,std_err,bound_theorem,bound_quadratic\n";
        for (std::size_t t = 0; t < outcome.traj.mean_loss.size(); ++t) {
            csv << t << ',' << fmt17(outcome.traj.mean_loss[t]) << ','
                << fmt17(outcome.traj.std_err[t]) << ',' << fmt17(bound_theorem[t]) << ','
                << fmt17(bound_quadratic[t]) << '\n';
        }
    }

    const std::string summary_path = config.output_path + ".summary";
    std::ofstream summary(summary_path);
    summary << "alpha = " << fmt17(inst.constants.alpha)
            << (inst.constants.alpha_source == Source::analytic ? " (analytic)\n" : " (estimated)\n");
    summary << "beta = " << fmt17(inst.constants.beta)
            << (inst.constants.beta_source == Source::analytic ? " (analytic)\n" : " (estimated)\n");
    summary << "lambda = " << fmt17(inst.constants.lambda)
            << (inst.constants.lambda_source == Source::analytic ? " (analytic)\n"
                                                                 : " (estimated)\n");
    summary << "eta_theorem1 = " << fmt17(step.eta_theorem1) << "\n";
    summary << "factor_theorem1 = " << fmt17(step.factor_theorem1)
            << "  # per-step factor at the printed step size; equals 1 at m = 1\n";
    summary << "eta_quadratic = " << fmt17(step.eta_quadratic) << "\n";
    summary << "factor_quadratic = " << fmt17(step.factor_quadratic) << "\n";
    summary << "eta_used = " << fmt17(step.eta_used) << "\n";
    summary << "factor_used = " << fmt17(step.factor_used) << "\n";
    summary << "initial_loss = " << fmt17(l0) << "\n";
    summary << "completed_runs = " << outcome.completed << "\n";
    for (const auto& [run, at] : outcome.diverged) {
        summary << "diverged run " << run << " at step " << at << "\n";
    }
    summary << "bound_check = " << (bound_pass ? "pass" : "fail") << "\n";

    std::cout << "wrote " << config.output_path << " and " << summary_path << "\n";
    if (outcome.completed == 0) {
        std::cerr << "cmd_run: all runs diverged\n";
        return kExitDivergence;
    }
    return kExitOk;
}

int cmd_verify(const std::string& config_path) {
    Config config;
    try {
        config = parse_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfigError;
    }

    ProblemInstance inst;
    try {
        inst = build_problem(config);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfigError;
    } catch (const InvalidInputError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfigError;
    } catch (const NumericalFailureError& e) {
        std::cerr << "generator self-check failed: " << e.what() << "\n";
        return kExitVerificationFailure;
    }

    const ErmObjective& obj = *inst.objective;
    const std::vector<Vector> probes =
        make_probes(inst.w_star, config.probes_count, config.probes_seed);
    const double reference = obj.value(probes.front());
    const double scale = std::max(1.0, reference);
    const double alpha =
        inst.constants.alpha * config.verify_alpha_scale.value_or(1.0);

    std::ostringstream report;
    bool all_pass = true;
    const auto record = [&](const std::string& name, bool pass, const std::string& detail) {
        report << name << ": " << (pass ? "PASS" : "FAIL");
        if (!detail.empty()) report << " (" << detail << ")";
        report << "\n";
        all_pass = all_pass && pass;
    };

    try {
        const auto interp = check_interpolation(obj, inst.w_star, 1e-12 * scale);
        record("interpolation", interp.pass,
               "max residual " + fmt17(interp.max_residual));

        const auto pl = verify_pl(obj, alpha, probes, 1e-12 * scale);
        record("pl_condition", pl.pass,
               "alpha " + fmt17(alpha) + ", worst margin " + fmt17(pl.worst_margin));

        const auto grad_bound = check_sample_gradient_bound(obj, probes);
        record("sample_gradient_bound", grad_bound.pass,
               "worst ratio " + fmt17(grad_bound.worst_ratio));

        if (inst.kind == ProblemKind::composed_nonlinear) {
            const auto transfer = verify_pl_transfer(
                *inst.base->objective, *inst.transform,
                inst.base->constants.alpha * config.verify_alpha_scale.value_or(1.0), probes,
                1e-12 * scale);
            record("pl_transfer", transfer.pass, "worst margin " + fmt17(transfer.worst_margin));

            bool sandwich = true;
            double worst_low = 0.0, worst_high = 0.0;
            for (const Vector& v : probes) {
                const Matrix j = inst.transform->jacobian(v);
                Eigen::SelfAdjointEigenSolver<Matrix> eig(j.transpose() * j);
                worst_low = std::min(worst_low, eig.eigenvalues().minCoeff() - inst.transform->a);
                worst_high = std::max(worst_high, eig.eigenvalues().maxCoeff() - inst.transform->b);
                if (eig.eigenvalues().minCoeff() < inst.transform->a - 1e-10 ||
                    eig.eigenvalues().maxCoeff() > inst.transform->b + 1e-10) {
                    sandwich = false;
                }
            }
            record("jacobian_spectral_sandwich", sandwich,
                   "min slack " + fmt17(worst_low) + ", max slack " + fmt17(worst_high));
        }

        if (inst.kind == ProblemKind::composed_linear) {
            std::vector<std::pair<Vector, Vector>> pairs;
            for (std::size_t i = 0; i + 1 < probes.size(); i += 2) {
                pairs.emplace_back(probes[i], probes[i + 1]);
            }
            const auto sc = check_strong_convexity_range(*inst.linmap, pairs);
            record("strong_convexity_range", sc.pass,
                   "worst margin " + fmt17(sc.worst_margin));

            // Every per-sample gradient must lie in Range(A^T) = Range(A^+).
            bool in_range = true;
            const auto& f = inst.linmap->factorization;
            for (std::size_t i = 0; i < std::min<std::size_t>(probes.size(), 50); ++i) {
                for (int s = 0; s < obj.sample_count(); ++s) {
                    const Vector g = obj.loss(s).gradient(probes[i]);
                    const Vector projected = f.pinv * (f.a * g);
                    if ((g - projected).norm() > 1e-10 * std::max(1.0, g.norm())) {
                        in_range = false;
                    }
                }
            }
            record("gradient_range", in_range, "");
        }

        // Gradients against central differences.
        numerics::ScalarFn value_fn = [&obj](const Vector& w) { return obj.value(w); };
        bool fd_pass = true;
        double fd_worst = 0.0;
        for (std::size_t i = 0; i < std::min<std::size_t>(probes.size(), 100); ++i) {
            const Vector g = obj.gradient(probes[i]);
            const Vector fd = numerics::finite_difference_gradient(value_fn, probes[i]);
            const double rel = (g - fd).norm() / std::max(1.0, g.norm());
            fd_worst = std::max(fd_worst, rel);
            if (rel > 1e-6) fd_pass = false;
        }
        record("gradient_vs_finite_differences", fd_pass, "worst rel error " + fmt17(fd_worst));
    } catch (const NumericalFailureError& e) {
        std::cerr << e.what() << "\n";
        return kExitNumericalFailure;
    }

    std::ofstream out(config.output_path);
    out << report.str();
    std::cout << report.str();
    return all_pass ? kExitOk : kExitVerificationFailure;
}

int cmd_sweep(const std::string& config_path, const std::vector<int>& batch_sizes) {
    Config config;
    ProblemInstance inst;
    try {
        config = parse_config(config_path);
        if (batch_sizes.empty()) throw ConfigError("cmd_sweep: no batch sizes given");
        for (int m : batch_sizes) {
            if (m < 1) throw ConfigError("cmd_sweep: batch sizes must be >= 1");
        }
        inst = build_problem(config);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfigError;
    } catch (const InvalidInputError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfigError;
    } catch (const NumericalFailureError& e) {
        std::cerr << e.what() << "\n";
        return kExitNumericalFailure;
    }

    const ErmObjective& obj = *inst.objective;
    Rng w0_rng = make_stream(config.sgd_seed, ~std::uint64_t{0});
    const Vector w0 = unit_gaussian(obj.dim(), w0_rng);

    std::ofstream csv(config.output_path);
    if (!csv) {
        std::cerr << "cmd_sweep: cannot write '" << config.output_path << "'\n";
        return kExitConfigError;
    }
    csv << "m,eta_theorem1,eta_quadratic,factor_theorem1,factor_quadratic,empirical_ratio\n";

    for (int m : batch_sizes) {
        ResolvedStep step;
        try {
            step = resolve_step(inst, config, m);
        } catch (const PreconditionViolationError& e) {
            std::cerr << e.what() << "\n";
            return kExitConfigError;
        }
        const RunOutcome outcome = execute_runs(obj, w0, step.eta_used, m, config.steps,
                                                config.runs, config.sgd_seed);
        if (outcome.completed == 0) {
            std::cerr << "cmd_sweep: all runs diverged for m = " << m << "\n";
            return kExitDivergence;
        }

        // Geometric-mean per-step loss ratio over the second half of the run.
        const std::size_t last = outcome.traj.mean_loss.size() - 1;
        const std::size_t first = last / 2;
        double ratio = std::numeric_limits<double>::quiet_NaN();
        if (last > first && outcome.traj.mean_loss[first] > 1e-300 &&
            outcome.traj.mean_loss[last] > 0.0) {
            ratio = std::pow(outcome.traj.mean_loss[last] / outcome.traj.mean_loss[first],
                             1.0 / static_cast<double>(last - first));
        }
        csv << m << ',' << fmt17(step.eta_theorem1) << ',' << fmt17(step.eta_quadratic) << ','
            << fmt17(step.factor_theorem1) << ',' << fmt17(step.factor_quadratic) << ','
            << fmt17(ratio) << '\n';
    }
    std::cout << "wrote " << config.output_path << "\n";
    return kExitOk;
}

}  // namespace plsgd::cli
