#pragma once

#include <memory>
#include <vector>

#include "plsgd/numerics.hpp"
#include "plsgd/objective.hpp"
#include "plsgd/sgd.hpp"
#include "plsgd/types.hpp"

namespace plsgd {

// L(w) = Ltilde(A w) with Ltilde strongly convex: the composed problem class
// whose projected distance to the minimizer contracts geometrically.
struct ComposedLinearProblem {
    numerics::LinearFactorization factorization;  // A with SVD and pseudo-inverse
    std::vector<SampleLoss> tilde_losses;          // l~_i over R^k
    double tilde_lambda = 0.0;                     // smoothness of Ltilde
    double tilde_alpha = 0.0;                      // strong convexity of Ltilde
    double tilde_beta = 0.0;                       // max per-sample smoothness of l~_i
    Vector z_star;                                 // unique minimizer of Ltilde
    Vector w_star;                                 // A w_star = z_star
    std::unique_ptr<ErmObjective> objective;       // l_i(w) = l~_i(A w) over R^d
};

// alpha * sigma_min_nonzero^2: PL constant of Ltilde(A .).
double pl_constant_from_composition(double alpha, double sigma_min_nonzero);

// m / (sigma_max^2 (beta + (m - 1) lambda)).
double step_size_theorem2(double beta, double lambda, double sigma_max, int m);

// 1 - alpha sigma_min^2 eta; must land in (0, 1).
double theorem2_rate_factor(double alpha, double sigma_min_nonzero, double eta);

struct Thm2Trajectory {
    Trajectory traj;
    std::vector<std::vector<double>> proj_dist;  // R x (T+1): ||A^+A (w_t - w*)||^2
    std::vector<double> mean_proj_dist;
    std::vector<double> proj_std_err;
};

// Standard mini-batch SGD on the composed losses, additionally recording the
// projected squared distance to w_star at every step of every run.
Thm2Trajectory run_sgd_thm2(const ComposedLinearProblem& p, const Vector& w0,
                            const SgdConfig& config);

struct StrongConvexityReport {
    bool pass = false;
    double worst_margin = 0.0;
    int failing_pairs = 0;
};

// Checks L(z1) >= L(z2) + <grad L(z2), z1 - z2> + (alpha sigma_min^2 / 2) ||z1 - z2||^2
// with slack 1e-8 * scale; inputs are projected into Range(A^+) first.
StrongConvexityReport check_strong_convexity_range(
    const ComposedLinearProblem& p, const std::vector<std::pair<Vector, Vector>>& pairs);

}  // namespace plsgd
