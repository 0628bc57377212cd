#pragma once

#include <vector>

#include "plsgd/numerics.hpp"
#include "plsgd/objective.hpp"
#include "plsgd/types.hpp"

namespace plsgd {

enum class Source { analytic, estimated };

// The (alpha, beta, lambda) bundle every step-size formula consumes.
// alpha: PL constant of the averaged objective, beta: per-sample smoothness
// (worst case over samples), lambda: smoothness of the average.
struct ConstantsReport {
    double alpha = 0.0;
    Source alpha_source = Source::estimated;
    double beta = 0.0;
    Source beta_source = Source::estimated;
    double lambda = 0.0;
    Source lambda_source = Source::estimated;
    int probe_count = 0;
    Vector alpha_worst_probe;  // probe attaining the smallest PL ratio seen
};

// min over qualifying probes of ||grad L(w)||^2 / L(w); an upper bound on any
// valid alpha over the probed region. Probes with loss <= loss_floor are skipped.
double estimate_pl_constant(const ErmObjective& obj, const std::vector<Vector>& probes,
                            double loss_floor, Vector* worst_probe = nullptr);

// Exact constants for L(w) = (1/2n) ||X w - y||^2 with y in Range(X):
// lambda = sigma_max(X)^2 / n, alpha = 2 sigma_min_nonzero(X)^2 / n,
// beta = max_i ||x_i||^2.
ConstantsReport analytic_constants_least_squares(const numerics::LinearFactorization& x,
                                                 const Vector& y);

// max over probes of the dominant Hessian eigenvalue estimate; a lower bound
// on the true global smoothness constant.
double estimate_smoothness(const numerics::ScalarFn& f, const numerics::GradientFn& grad,
                           const std::vector<Vector>& probes, int iters = 200,
                           std::uint64_t seed = 0);
double estimate_smoothness(const ErmObjective& obj, const std::vector<Vector>& probes,
                           int iters = 200, std::uint64_t seed = 0);

struct PlReport {
    bool pass = false;
    double worst_margin = 0.0;  // most negative value of ||grad||^2 - alpha * loss
    Vector worst_probe;
    int qualifying_probes = 0;
};

// pass iff ||grad L(w)||^2 >= alpha L(w) - 1e-10 * scale at every probe with
// loss above loss_floor.
PlReport verify_pl(const ErmObjective& obj, double alpha, const std::vector<Vector>& probes,
                   double loss_floor);

// Standard probe protocol: Gaussian perturbations of w_star at radius scales
// {0.1, 1, 10} * max(1, ||w_star||), plus pure standard Gaussians, cycled.
std::vector<Vector> make_probes(const Vector& w_star, int count, std::uint64_t seed);

}  // namespace plsgd
