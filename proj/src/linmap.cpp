#include "plsgd/linmap.hpp"

#include <cmath>

#include "plsgd/errors.hpp"

namespace plsgd {

double pl_constant_from_composition(double alpha, double sigma_min_nonzero) {
    if (!(alpha > 0.0) || !(sigma_min_nonzero > 0.0)) {
        throw InvalidInputError("pl_constant_from_composition: inputs must be positive");
    }
    return alpha * sigma_min_nonzero * sigma_min_nonzero;
}

double step_size_theorem2(double beta, double lambda, double sigma_max, int m) {
    if (!(beta > 0.0) || !(lambda > 0.0) || !(sigma_max > 0.0) || m < 1) {
        throw InvalidInputError("step_size_theorem2: constants must be positive and m >= 1");
    }
    const double md = static_cast<double>(m);
    return md / (sigma_max * sigma_max * (beta + (md - 1.0) * lambda));
}

double theorem2_rate_factor(double alpha, double sigma_min_nonzero, double eta) {
    if (!(alpha > 0.0) || !(sigma_min_nonzero > 0.0) || !(eta > 0.0)) {
        throw InvalidInputError("theorem2_rate_factor: inputs must be positive");
    }
    const double factor = 1.0 - alpha * sigma_min_nonzero * sigma_min_nonzero * eta;
    if (!(factor > 0.0) || !(factor < 1.0)) {
        throw NonContractiveError("theorem2_rate_factor: factor outside (0, 1)");
    }
    return factor;
}

Thm2Trajectory run_sgd_thm2(const ComposedLinearProblem& p, const Vector& w0,
                            const SgdConfig& config) {
    const ErmObjective& obj = *p.objective;
    if (w0.size() != obj.dim()) throw InvalidInputError("run_sgd_thm2: w0 dimension mismatch");
    if (config.m < 1 || config.runs < 1 || config.steps < 0) {
        throw InvalidInputError("run_sgd_thm2: invalid config");
    }

    // Projector onto Range(A^+) applied to the offset from w_star.
    const Matrix projector = p.factorization.pinv * p.factorization.a;
    const auto proj_dist = [&](const Vector& w) {
        return (projector * (w - p.w_star)).squaredNorm();
    };

    const double l0 = obj.value(w0);
    const double loss_limit = 1e12 * std::max(l0, 1.0);

    Thm2Trajectory out;
    out.traj.losses.assign(static_cast<std::size_t>(config.runs), {});
    out.proj_dist.assign(static_cast<std::size_t>(config.runs), {});

    for (int r = 0; r < config.runs; ++r) {
        Rng rng = make_stream(config.seed, static_cast<std::uint64_t>(r));
        Vector w = w0;
        auto& losses = out.traj.losses[static_cast<std::size_t>(r)];
        auto& dists = out.proj_dist[static_cast<std::size_t>(r)];
        losses.push_back(l0);
        dists.push_back(proj_dist(w));
        for (int t = 0; t < config.steps; ++t) {
            const BatchIndices batch = sample_batch(obj.sample_count(), config.m, rng);
            w -= config.eta * minibatch_gradient(obj, w, batch);
            const double loss = obj.value(w);
            if (!std::isfinite(loss) || !w.allFinite() || loss > loss_limit) {
                throw DivergenceError("run_sgd_thm2: divergence in run " + std::to_string(r) +
                                          " at step " + std::to_string(t + 1),
                                      r, t + 1);
            }
            losses.push_back(loss);
            dists.push_back(proj_dist(w));
        }
        out.traj.final_params.push_back(w);
    }

    aggregate_runs(out.traj);
    out.traj.bound.assign(out.traj.mean_loss.size(), 0.0);
    if (!out.traj.bound.empty()) out.traj.bound[0] = l0;

    // Aggregate projected distances the same way as losses.
    const std::size_t len = out.proj_dist.front().size();
    const auto runs = static_cast<double>(config.runs);
    out.mean_proj_dist.assign(len, 0.0);
    out.proj_std_err.assign(len, 0.0);
    for (const auto& curve : out.proj_dist) {
        for (std::size_t t = 0; t < len; ++t) out.mean_proj_dist[t] += curve[t];
    }
    for (std::size_t t = 0; t < len; ++t) out.mean_proj_dist[t] /= runs;
    if (config.runs > 1) {
        for (const auto& curve : out.proj_dist) {
            for (std::size_t t = 0; t < len; ++t) {
                const double d = curve[t] - out.mean_proj_dist[t];
                out.proj_std_err[t] += d * d;
            }
        }
        for (std::size_t t = 0; t < len; ++t) {
            out.proj_std_err[t] = std::sqrt(out.proj_std_err[t] / (runs - 1.0) / runs);
        }
    }
    return out;
}

StrongConvexityReport check_strong_convexity_range(
    const ComposedLinearProblem& p, const std::vector<std::pair<Vector, Vector>>& pairs) {
    const ErmObjective& obj = *p.objective;
    const double mu = pl_constant_from_composition(p.tilde_alpha, p.factorization.sigma_min_nonzero);

    StrongConvexityReport report;
    report.pass = true;
    for (const auto& [raw1, raw2] : pairs) {
        const Vector z1 = numerics::project_range_pinv(p.factorization, raw1);
        const Vector z2 = numerics::project_range_pinv(p.factorization, raw2);
        const double lhs = obj.value(z1);
        const double rhs = obj.value(z2) + obj.gradient(z2).dot(z1 - z2) +
                           mu / 2.0 * (z1 - z2).squaredNorm();
        const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
        const double margin = lhs - rhs;
        if (margin < report.worst_margin) report.worst_margin = margin;
        if (margin < -1e-8 * scale) {
            report.pass = false;
            ++report.failing_pairs;
        }
    }
    return report;
}

}  // namespace plsgd
