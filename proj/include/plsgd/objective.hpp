#pragma once

#include <functional>
#include <vector>

#include "plsgd/types.hpp"

namespace plsgd {

// One differentiable, non-negative sample loss with a claimed smoothness bound.
struct SampleLoss {
    int dim = 0;
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> gradient;
    double beta = 0.0;  // smoothness constant; implies ||grad||^2 <= 2 beta value
};

// Interpolated ERM objective: the average of n sample losses of common dimension.
// Immutable after construction; evaluation is thread-safe.
class ErmObjective {
public:
    explicit ErmObjective(std::vector<SampleLoss> losses);

    int dim() const { return dim_; }
    int sample_count() const { return static_cast<int>(losses_.size()); }
    const SampleLoss& loss(int i) const { return losses_[static_cast<std::size_t>(i)]; }
    const std::vector<SampleLoss>& losses() const { return losses_; }

    double value(const Vector& w) const;
    Vector gradient(const Vector& w) const;

private:
    std::vector<SampleLoss> losses_;
    int dim_;
};

struct BatchIndices {
    std::vector<int> indices;  // each in [0, n); repetitions allowed
};

double erm_value(const ErmObjective& obj, const Vector& w);

// (1/m) sum_j grad_{i_j}(w). Its expectation over uniform batches is the full gradient.
Vector minibatch_gradient(const ErmObjective& obj, const Vector& w, const BatchIndices& batch);

// m i.i.d. uniform draws from {0, ..., n-1} (sampling with replacement).
BatchIndices sample_batch(int n, int m, Rng& rng);

struct InterpolationReport {
    double max_residual = 0.0;
    std::vector<double> residuals;
    bool pass = false;
};

// pass iff max_i l_i(w) <= tol: every sample loss vanishes simultaneously at w.
InterpolationReport check_interpolation(const ErmObjective& obj, const Vector& w, double tol);

struct GradientBoundReport {
    double worst_ratio = 0.0;  // max over probes/samples of ||grad l_i||^2 / (2 beta_i l_i)
    int worst_sample = -1;
    bool pass = false;
};

// Checks ||grad l_i(w)||^2 <= 2 beta_i l_i(w) at all probes, skipping losses
// below the floor 1e-14 where the ratio is dominated by rounding.
GradientBoundReport check_sample_gradient_bound(const ErmObjective& obj,
                                                const std::vector<Vector>& probes);

}  // namespace plsgd
