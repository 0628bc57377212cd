#include "plsgd/objective.hpp"

#include <cmath>

#include "plsgd/errors.hpp"

namespace plsgd {

namespace {
constexpr double kLossFloor = 1e-14;
}

ErmObjective::ErmObjective(std::vector<SampleLoss> losses) : losses_(std::move(losses)) {
    if (losses_.empty()) {
        throw InvalidInputError("ErmObjective: needs at least one sample loss");
    }
    dim_ = losses_.front().dim;
    for (const auto& l : losses_) {
        if (l.dim != dim_) {
            throw InvalidInputError("ErmObjective: sample losses have mismatched dimensions");
        }
        if (!(l.beta > 0.0)) {
            throw InvalidInputError("ErmObjective: sample beta must be positive");
        }
    }
}

double ErmObjective::value(const Vector& w) const {
    if (w.size() != dim_) throw InvalidInputError("ErmObjective::value: dimension mismatch");
    double sum = 0.0;
    for (const auto& l : losses_) sum += l.value(w);
    return sum / static_cast<double>(losses_.size());
}

Vector ErmObjective::gradient(const Vector& w) const {
    if (w.size() != dim_) throw InvalidInputError("ErmObjective::gradient: dimension mismatch");
    Vector g = Vector::Zero(dim_);
    for (const auto& l : losses_) g += l.gradient(w);
    return g / static_cast<double>(losses_.size());
}

double erm_value(const ErmObjective& obj, const Vector& w) { return obj.value(w); }

Vector minibatch_gradient(const ErmObjective& obj, const Vector& w, const BatchIndices& batch) {
    if (batch.indices.empty()) {
        throw InvalidInputError("minibatch_gradient: empty batch");
    }
    Vector g = Vector::Zero(obj.dim());
    for (int i : batch.indices) {
        if (i < 0 || i >= obj.sample_count()) {
            throw InvalidInputError("minibatch_gradient: batch index out of range");
        }
        g += obj.loss(i).gradient(w);
    }
    return g / static_cast<double>(batch.indices.size());
}

BatchIndices sample_batch(int n, int m, Rng& rng) {
    if (n < 1) throw InvalidInputError("sample_batch: n must be >= 1");
    if (m < 1) throw InvalidInputError("sample_batch: m must be >= 1");
    std::uniform_int_distribution<int> uniform(0, n - 1);
    BatchIndices batch;
    batch.indices.reserve(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) batch.indices.push_back(uniform(rng));
    return batch;
}

InterpolationReport check_interpolation(const ErmObjective& obj, const Vector& w, double tol) {
    if (!(tol > 0.0)) throw InvalidInputError("check_interpolation: tol must be positive");
    InterpolationReport report;
    report.residuals.reserve(static_cast<std::size_t>(obj.sample_count()));
    for (int i = 0; i < obj.sample_count(); ++i) {
        const double r = obj.loss(i).value(w);
        report.residuals.push_back(r);
        report.max_residual = std::max(report.max_residual, r);
    }
    report.pass = report.max_residual <= tol;
    return report;
}

GradientBoundReport check_sample_gradient_bound(const ErmObjective& obj,
                                                const std::vector<Vector>& probes) {
    GradientBoundReport report;
    for (const Vector& w : probes) {
        for (int i = 0; i < obj.sample_count(); ++i) {
            const SampleLoss& l = obj.loss(i);
            const double value = l.value(w);
            if (value <= kLossFloor) continue;
            const double ratio = l.gradient(w).squaredNorm() / (2.0 * l.beta * value);
            if (ratio > report.worst_ratio) {
                report.worst_ratio = ratio;
                report.worst_sample = i;
            }
        }
    }
    report.pass = report.worst_ratio <= 1.0 + 1e-8;
    return report;
}

}  // namespace plsgd
