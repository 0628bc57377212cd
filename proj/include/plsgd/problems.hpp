#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "plsgd/constants.hpp"
#include "plsgd/linmap.hpp"
#include "plsgd/objective.hpp"
#include "plsgd/transform.hpp"
#include "plsgd/types.hpp"

namespace plsgd {

enum class ProblemKind { least_squares, composed_linear, composed_nonlinear };

// A generated problem with exact analytic constants. Every generator validates
// interpolation, the PL constant, and the per-sample gradient bound before
// returning; generation throws if any check fails.
struct ProblemInstance {
    ProblemKind kind = ProblemKind::least_squares;
    std::shared_ptr<ErmObjective> objective;
    ConstantsReport constants;
    Vector w_star;  // interpolating point in the objective's own space

    // least_squares extras
    Matrix x;
    Vector y;
    std::shared_ptr<numerics::LinearFactorization> x_fact;

    // composed_nonlinear extras
    std::optional<TransformSpec> transform;
    std::shared_ptr<ProblemInstance> base;

    // composed_linear extras
    std::shared_ptr<ComposedLinearProblem> linmap;
};

// Interpolated least squares: l_i(w) = (1/2)(x_i^T w - y_i)^2 with y = X w*.
// d >= n so the interpolating solution exists generically. An optional
// prescribed spectrum replaces the singular values of the Gaussian X.
ProblemInstance gen_interpolated_least_squares(int n, int d, std::uint64_t seed,
                                               const std::vector<double>& spectrum = {});

// Strongly-convex-through-linear-map instance: l~_i(z) = (1/2)(u_i^T (z - z*))^2
// over R^k composed with A in R^{k x d} of prescribed rank. Requires n >= k so
// the average of the l~_i is strongly convex.
ProblemInstance gen_composed_linear(int n, int d, int k, int rank, std::uint64_t seed);

// Composition of a least-squares base with the elementwise sine transform
// phi(v) = v + c sin(v); a = (1-c)^2, b = (1+c)^2. PL constant a * alpha is
// exact; the recorded smoothness b * lambda is an empirical extrapolation for
// this non-affine map and is tagged estimated.
ProblemInstance gen_composed_nonlinear(const ProblemInstance& base, double c);

// Full self-check used by generators and cmd_verify: interpolation at w_star,
// verify_pl with constants.alpha, per-sample gradient bound, gradients vs
// finite differences. Throws on the first failed check.
void validate_instance(const ProblemInstance& instance, int probe_count = 200,
                       std::uint64_t probe_seed = 12345);

}  // namespace plsgd
