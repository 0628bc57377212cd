#include "plsgd/oracle.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "plsgd/errors.hpp"
#include "plsgd/numerics.hpp"

namespace plsgd::oracle {

double exact_one_step_expectation(const ErmObjective& obj, const Vector& w, double eta, int m) {
    if (m < 1) throw InvalidInputError("exact_one_step_expectation: m must be >= 1");
    const int n = obj.sample_count();
    double outcomes = 1.0;
    for (int j = 0; j < m; ++j) {
        outcomes *= static_cast<double>(n);
        if (outcomes > 1e6) {
            throw EnumerationTooLargeError("exact_one_step_expectation: n^m exceeds 1e6");
        }
    }

    // Sample gradients are batch-independent; evaluate each once.
    std::vector<Vector> grads;
    grads.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) grads.push_back(obj.loss(i).gradient(w));

    // Odometer over ordered index tuples (i_1, ..., i_m) in {0..n-1}^m.
    std::vector<int> tuple(static_cast<std::size_t>(m), 0);
    double sum = 0.0;
    while (true) {
        Vector g = Vector::Zero(obj.dim());
        for (int idx : tuple) g += grads[static_cast<std::size_t>(idx)];
        g /= static_cast<double>(m);
        sum += obj.value(w - eta * g);

        int pos = m - 1;
        while (pos >= 0 && ++tuple[static_cast<std::size_t>(pos)] == n) {
            tuple[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return sum / outcomes;
}

double grid_pl_constant(const std::function<double(const Vector&)>& f, const Vector& lo,
                        const Vector& hi, int resolution, double loss_floor) {
    const Index dim = lo.size();
    if (dim < 1 || dim > 2 || hi.size() != dim) {
        throw InvalidInputError("grid_pl_constant: dimension must be 1 or 2");
    }
    if (resolution < 2) throw InvalidInputError("grid_pl_constant: resolution must be >= 2");

    double best = std::numeric_limits<double>::infinity();
    int qualifying = 0;
    const auto consider = [&](const Vector& w) {
        const double value = f(w);
        if (value <= loss_floor) return;
        ++qualifying;
        const Vector g = numerics::finite_difference_gradient(f, w);
        best = std::min(best, g.squaredNorm() / value);
    };

    Vector w(dim);
    for (int i = 0; i < resolution; ++i) {
        w(0) = lo(0) + (hi(0) - lo(0)) * i / (resolution - 1.0);
        if (dim == 1) {
            consider(w);
        } else {
            for (int j = 0; j < resolution; ++j) {
                w(1) = lo(1) + (hi(1) - lo(1)) * j / (resolution - 1.0);
                consider(w);
            }
        }
    }
    if (qualifying == 0) {
        throw InsufficientProbesError("grid_pl_constant: no grid point above the loss floor");
    }
    return best;
}

}  // namespace plsgd::oracle
