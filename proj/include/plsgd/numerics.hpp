#pragma once

#include <functional>

#include "plsgd/types.hpp"

namespace plsgd::numerics {

using ScalarFn = std::function<double(const Vector&)>;
using GradientFn = std::function<Vector(const Vector&)>;

// Full SVD of a dense matrix together with the quantities derived from it:
// numerical rank, the extreme nonzero singular values and the Moore-Penrose
// pseudo-inverse. rank uses the cutoff 1e-10 * sigma_max * max(rows, cols).
struct LinearFactorization {
    Matrix a;                 // k x d original matrix
    Matrix u;                 // k x k orthogonal
    Vector singular_values;   // min(k, d), non-increasing
    Matrix v;                 // d x d orthogonal
    Index rank = 0;
    double sigma_min_nonzero = 0.0;  // smallest singular value above the cutoff
    double sigma_max = 0.0;
    Matrix pinv;              // d x k
};

double rank_tolerance(double sigma_max, Index rows, Index cols);

LinearFactorization svd(const Matrix& a);

// Orthogonal projection of w onto Range(A^+) = Null(A)^perp, i.e. A^+ A w.
Vector project_range_pinv(const LinearFactorization& f, const Vector& w);

// Default central-difference step: 1e-5 * max(1, ||w||).
double default_fd_step(const Vector& w);

// Central differences (f(w + h e_p) - f(w - h e_p)) / (2h) per coordinate.
// h <= 0 selects the default step.
Vector finite_difference_gradient(const ScalarFn& f, const Vector& w, double h = 0.0);

struct SpectralNormEstimate {
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Power iteration on Hessian-vector products (grad(w + h v) - grad(w - h v)) / (2h).
// Returns the dominant Hessian eigenvalue magnitude at w.
SpectralNormEstimate hessian_spectral_norm_estimate(const ScalarFn& f, const GradientFn& grad,
                                                    const Vector& w, int iters,
                                                    std::uint64_t seed);

// Variant for black-box scalar functions: the gradient itself is approximated
// by central differences.
SpectralNormEstimate hessian_spectral_norm_estimate(const ScalarFn& f, const Vector& w,
                                                    int iters, std::uint64_t seed);

}  // namespace plsgd::numerics
