#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "plsgd/constants.hpp"
#include "plsgd/objective.hpp"
#include "plsgd/types.hpp"

namespace plsgd {

// A smooth map phi: R^k -> R^d (d >= k) with analytic spectral bounds
// a <= eigenvalues of J^T J <= b. Immutable; evaluations are pure.
struct TransformSpec {
    int in_dim = 0;   // k
    int out_dim = 0;  // d >= k
    std::function<Vector(const Vector&)> phi;
    std::function<Matrix(const Vector&)> jacobian;  // d x k
    double a = 0.0;  // lower eigenvalue bound of J^T J
    double b = 0.0;  // upper eigenvalue bound
};

TransformSpec identity_transform(int k);

// phi(v) = M v; a = sigma_min(M)^2, b = sigma_max(M)^2. Requires full column rank.
TransformSpec linear_transform(const Matrix& m);

// Elementwise phi(v)_j = v_j + c sin(v_j) for c in (0, 1); a bijection of R^k
// with a = (1-c)^2 and b = (1+c)^2.
TransformSpec sine_transform(int k, double c);

// Inverts the elementwise sine transform coordinate-wise (Newton iteration).
Vector sine_transform_inverse(double c, const Vector& w);

// Per-sample losses v -> l_i(phi(v)) with chain-rule gradients J^T grad l_i(phi(v));
// composed per-sample beta is b * beta_i.
ErmObjective compose_objective(const ErmObjective& obj, const TransformSpec& t);

// Claim-style constant transfer: (a alpha, b lambda).
std::pair<double, double> composed_constants(double alpha, double lambda, double a, double b);

// eta_phi = (a / b^2) * eta_star.
double step_size_corollary(double eta_star, double a, double b);

// 1 - (a^2/b^2) * alpha * eta_star / 2.
double corollary_bound_factor(double alpha, double eta_star, double a, double b);

// pass iff ||J(v)^T grad L(phi(v))||^2 >= a alpha L(phi(v)) - 1e-8 * scale
// at every probe whose composed loss is above loss_floor.
PlReport verify_pl_transfer(const ErmObjective& obj, const TransformSpec& t, double alpha,
                            const std::vector<Vector>& probes, double loss_floor);

}  // namespace plsgd
