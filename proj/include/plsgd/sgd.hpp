#pragma once

#include <vector>

#include "plsgd/objective.hpp"
#include "plsgd/types.hpp"

namespace plsgd {

enum class EtaRule { explicit_value, theorem1, quadratic_opt, theorem2, corollary };

struct SgdConfig {
    int m = 1;            // batch size
    double eta = 0.0;     // constant step size
    int steps = 0;        // T
    int runs = 1;         // R independent repetitions
    std::uint64_t seed = 0;
    EtaRule eta_rule = EtaRule::explicit_value;
};

// Per-step loss records over R independent runs plus their aggregates.
struct Trajectory {
    std::vector<std::vector<double>> losses;  // R x (T+1); losses[r][0] = L(w0)
    std::vector<double> mean_loss;            // length T+1
    std::vector<double> std_err;              // length T+1; 0 when R == 1
    std::vector<double> bound;                // theoretical curve; bound[0] = L(w0)
    std::vector<Vector> final_params;         // R vectors
};

// Printed step size of the mini-batch SGD convergence guarantee:
// alpha m / (lambda (beta + lambda (m - 1))).
double step_size_theorem1(double alpha, double beta, double lambda, int m);

// Minimizer of the per-step quadratic contraction factor:
// alpha m / (lambda (alpha (m - 1) + 2 beta)).
double step_size_quadratic_opt(double alpha, double beta, double lambda, int m);

// Per-step factor 1 - eta alpha + eta^2 (lambda/m)(alpha (m-1)/2 + beta),
// valid for eta <= 2/lambda. At eta = step_size_quadratic_opt it equals
// 1 - alpha eta / 2 exactly.
double contraction_factor(double eta, double alpha, double beta, double lambda, int m);

// One SGD run from w0, drawing batches from rng. Returns the loss curve of
// length steps+1 and leaves the final iterate in w_out. Throws DivergenceError
// (tagged with run_index) when the loss blows up or turns non-finite.
std::vector<double> run_sgd_single(const ErmObjective& obj, const Vector& w0, double eta, int m,
                                   int steps, Rng& rng, Vector& w_out, int run_index = 0);

// Constant-step mini-batch SGD, batches sampled with replacement. Each run r
// draws from the independent stream (seed, r); results are deterministic.
Trajectory run_sgd(const ErmObjective& obj, const Vector& w0, const SgdConfig& config);

// Full-gradient descent baseline; returns the loss curve of length steps+1.
std::vector<double> run_gd(const ErmObjective& obj, const Vector& w0, double eta, int steps);

// curve[t] = factor^t * l0.
std::vector<double> theoretical_bound_curve(double l0, double factor, int steps);

// Aggregates per-run curves into mean and standard error, in run-index order.
void aggregate_runs(Trajectory& traj);

}  // namespace plsgd
