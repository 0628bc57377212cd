#include "plsgd/constants.hpp"

#include <cmath>
#include <limits>

#include "plsgd/errors.hpp"

namespace plsgd {

double estimate_pl_constant(const ErmObjective& obj, const std::vector<Vector>& probes,
                            double loss_floor, Vector* worst_probe) {
    double best = std::numeric_limits<double>::infinity();
    int qualifying = 0;
    for (const Vector& w : probes) {
        const double value = obj.value(w);
        if (value <= loss_floor) continue;
        ++qualifying;
        const double ratio = obj.gradient(w).squaredNorm() / value;
        if (ratio < best) {
            best = ratio;
            if (worst_probe) *worst_probe = w;
        }
    }
    if (qualifying == 0) {
        throw InsufficientProbesError("estimate_pl_constant: no probe above the loss floor");
    }
    return best;
}

ConstantsReport analytic_constants_least_squares(const numerics::LinearFactorization& x,
                                                 const Vector& y) {
    if (y.size() != x.a.rows()) {
        throw InvalidInputError("analytic_constants_least_squares: y dimension mismatch");
    }
    const auto n = static_cast<double>(x.a.rows());

    // Interpolation requires y in Range(X); otherwise the infimum is positive.
    const Vector y_range = x.a * (x.pinv * y);
    const double scale = std::max(1.0, y.norm());
    if ((y - y_range).norm() > 1e-8 * scale) {
        throw NotInterpolatedError(
            "analytic_constants_least_squares: y is not in Range(X); problem is not interpolated");
    }

    ConstantsReport report;
    report.lambda = x.sigma_max * x.sigma_max / n;
    report.lambda_source = Source::analytic;
    report.alpha = 2.0 * x.sigma_min_nonzero * x.sigma_min_nonzero / n;
    report.alpha_source = Source::analytic;
    report.beta = x.a.rowwise().squaredNorm().maxCoeff();
    report.beta_source = Source::analytic;
    return report;
}

double estimate_smoothness(const numerics::ScalarFn& f, const numerics::GradientFn& grad,
                           const std::vector<Vector>& probes, int iters, std::uint64_t seed) {
    if (probes.empty()) throw InvalidInputError("estimate_smoothness: no probes");
    double worst = 0.0;
    std::uint64_t probe_index = 0;
    for (const Vector& w : probes) {
        const auto est =
            numerics::hessian_spectral_norm_estimate(f, grad, w, iters, seed + probe_index++);
        worst = std::max(worst, est.value);
    }
    return worst;
}

double estimate_smoothness(const ErmObjective& obj, const std::vector<Vector>& probes, int iters,
                           std::uint64_t seed) {
    numerics::ScalarFn f = [&obj](const Vector& w) { return obj.value(w); };
    numerics::GradientFn grad = [&obj](const Vector& w) { return obj.gradient(w); };
    return estimate_smoothness(f, grad, probes, iters, seed);
}

PlReport verify_pl(const ErmObjective& obj, double alpha, const std::vector<Vector>& probes,
                   double loss_floor) {
    if (!(alpha > 0.0)) throw InvalidInputError("verify_pl: alpha must be positive");
    PlReport report;
    report.pass = true;
    for (const Vector& w : probes) {
        const double value = obj.value(w);
        if (value <= loss_floor) continue;
        ++report.qualifying_probes;
        const double margin = obj.gradient(w).squaredNorm() - alpha * value;
        if (margin < report.worst_margin) {
            report.worst_margin = margin;
            report.worst_probe = w;
        }
        if (margin < -1e-10 * std::max(1.0, value)) report.pass = false;
    }
    return report;
}

std::vector<Vector> make_probes(const Vector& w_star, int count, std::uint64_t seed) {
    if (count < 1) throw InvalidInputError("make_probes: count must be >= 1");
    Rng rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double base = std::max(1.0, w_star.norm());
    const double radii[] = {0.1 * base, base, 10.0 * base};

    std::vector<Vector> probes;
    probes.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        Vector g(w_star.size());
        for (Index p = 0; p < g.size(); ++p) g(p) = gauss(rng);
        const int mode = i % 4;
        if (mode < 3) {
            probes.push_back(w_star + radii[mode] * g / std::max(g.norm(), 1e-300));
        } else {
            probes.push_back(g);  // far-field probe, unrelated to w_star
        }
    }
    return probes;
}

}  // namespace plsgd
