#include "plsgd/sgd.hpp"

#include <cmath>
#include <string>

#include "plsgd/errors.hpp"

namespace plsgd {

namespace {

void require_positive_constants(double alpha, double beta, double lambda, int m,
                                const char* who) {
    if (!(alpha > 0.0) || !(beta > 0.0) || !(lambda > 0.0) || m < 1) {
        throw InvalidInputError(std::string(who) + ": constants must be positive and m >= 1");
    }
}

constexpr double kDivergenceRatio = 1e12;

}  // namespace

double step_size_theorem1(double alpha, double beta, double lambda, int m) {
    require_positive_constants(alpha, beta, lambda, m, "step_size_theorem1");
    const double md = static_cast<double>(m);
    return alpha * md / (lambda * (beta + lambda * (md - 1.0)));
}

double step_size_quadratic_opt(double alpha, double beta, double lambda, int m) {
    require_positive_constants(alpha, beta, lambda, m, "step_size_quadratic_opt");
    const double md = static_cast<double>(m);
    return alpha * md / (lambda * (alpha * (md - 1.0) + 2.0 * beta));
}

double contraction_factor(double eta, double alpha, double beta, double lambda, int m) {
    require_positive_constants(alpha, beta, lambda, m, "contraction_factor");
    if (eta < 0.0) throw InvalidInputError("contraction_factor: eta must be non-negative");
    if (eta > 2.0 / lambda) {
        throw PreconditionViolationError("contraction_factor: eta exceeds 2/lambda");
    }
    const double md = static_cast<double>(m);
    return 1.0 - eta * alpha + eta * eta * (lambda / md) * (alpha * (md - 1.0) / 2.0 + beta);
}

std::vector<double> run_sgd_single(const ErmObjective& obj, const Vector& w0, double eta, int m,
                                   int steps, Rng& rng, Vector& w_out, int run_index) {
    if (w0.size() != obj.dim()) throw InvalidInputError("run_sgd_single: w0 dimension mismatch");
    if (m < 1) throw InvalidInputError("run_sgd_single: batch size must be >= 1");
    if (steps < 0) throw InvalidInputError("run_sgd_single: steps must be >= 0");
    if (!(eta >= 0.0) || !std::isfinite(eta)) {
        throw InvalidInputError("run_sgd_single: eta must be finite and non-negative");
    }

    const double l0 = obj.value(w0);
    const double loss_limit = kDivergenceRatio * std::max(l0, 1.0);

    std::vector<double> curve;
    curve.reserve(static_cast<std::size_t>(steps) + 1);
    curve.push_back(l0);
    Vector w = w0;
    for (int t = 0; t < steps; ++t) {
        const BatchIndices batch = sample_batch(obj.sample_count(), m, rng);
        w -= eta * minibatch_gradient(obj, w, batch);
        const double loss = obj.value(w);
        if (!std::isfinite(loss) || !w.allFinite() || loss > loss_limit) {
            throw DivergenceError("run_sgd: divergence in run " + std::to_string(run_index) +
                                      " at step " + std::to_string(t + 1),
                                  run_index, t + 1);
        }
        curve.push_back(loss);
    }
    w_out = w;
    return curve;
}

Trajectory run_sgd(const ErmObjective& obj, const Vector& w0, const SgdConfig& config) {
    if (w0.size() != obj.dim()) throw InvalidInputError("run_sgd: w0 dimension mismatch");
    if (config.m < 1) throw InvalidInputError("run_sgd: batch size must be >= 1");
    if (config.runs < 1) throw InvalidInputError("run_sgd: runs must be >= 1");
    if (config.steps < 0) throw InvalidInputError("run_sgd: steps must be >= 0");
    if (!(config.eta >= 0.0) || !std::isfinite(config.eta)) {
        throw InvalidInputError("run_sgd: eta must be finite and non-negative");
    }

    const double l0 = obj.value(w0);

    Trajectory traj;
    traj.losses.assign(static_cast<std::size_t>(config.runs), {});
    traj.final_params.reserve(static_cast<std::size_t>(config.runs));

    for (int r = 0; r < config.runs; ++r) {
        Rng rng = make_stream(config.seed, static_cast<std::uint64_t>(r));
        Vector w_final;
        traj.losses[static_cast<std::size_t>(r)] =
            run_sgd_single(obj, w0, config.eta, config.m, config.steps, rng, w_final, r);
        traj.final_params.push_back(std::move(w_final));
    }

    aggregate_runs(traj);
    traj.bound.assign(traj.mean_loss.size(), 0.0);
    if (!traj.bound.empty()) traj.bound[0] = l0;
    return traj;
}

std::vector<double> run_gd(const ErmObjective& obj, const Vector& w0, double eta, int steps) {
    if (w0.size() != obj.dim()) throw InvalidInputError("run_gd: w0 dimension mismatch");
    if (eta < 0.0) throw InvalidInputError("run_gd: eta must be non-negative");

    std::vector<double> curve;
    curve.reserve(static_cast<std::size_t>(steps) + 1);
    Vector w = w0;
    const double l0 = obj.value(w0);
    const double loss_limit = kDivergenceRatio * std::max(l0, 1.0);
    curve.push_back(l0);
    for (int t = 0; t < steps; ++t) {
        w -= eta * obj.gradient(w);
        const double loss = obj.value(w);
        if (!std::isfinite(loss) || !w.allFinite() || loss > loss_limit) {
            throw DivergenceError("run_gd: divergence at step " + std::to_string(t + 1), 0, t + 1);
        }
        curve.push_back(loss);
    }
    return curve;
}

std::vector<double> theoretical_bound_curve(double l0, double factor, int steps) {
    if (!(factor >= 0.0) || !(factor <= 1.0)) {
        throw InvalidInputError("theoretical_bound_curve: factor must lie in [0, 1]");
    }
    if (!(l0 >= 0.0)) throw InvalidInputError("theoretical_bound_curve: l0 must be >= 0");
    std::vector<double> curve;
    curve.reserve(static_cast<std::size_t>(steps) + 1);
    double v = l0;
    curve.push_back(v);
    for (int t = 0; t < steps; ++t) {
        v *= factor;
        curve.push_back(v);
    }
    return curve;
}

void aggregate_runs(Trajectory& traj) {
    if (traj.losses.empty()) return;
    const std::size_t len = traj.losses.front().size();
    const auto runs = static_cast<double>(traj.losses.size());
    traj.mean_loss.assign(len, 0.0);
    traj.std_err.assign(len, 0.0);

    for (const auto& curve : traj.losses) {
        for (std::size_t t = 0; t < len; ++t) traj.mean_loss[t] += curve[t];
    }
    for (std::size_t t = 0; t < len; ++t) traj.mean_loss[t] /= runs;

    if (traj.losses.size() > 1) {
        for (const auto& curve : traj.losses) {
            for (std::size_t t = 0; t < len; ++t) {
                const double d = curve[t] - traj.mean_loss[t];
                traj.std_err[t] += d * d;
            }
        }
        for (std::size_t t = 0; t < len; ++t) {
            traj.std_err[t] = std::sqrt(traj.std_err[t] / (runs - 1.0) / runs);
        }
    }
}

}  // namespace plsgd
