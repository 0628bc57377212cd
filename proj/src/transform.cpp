#include "plsgd/transform.hpp"

#include <cmath>

#include "plsgd/errors.hpp"
#include "plsgd/numerics.hpp"

namespace plsgd {

TransformSpec identity_transform(int k) {
    if (k < 1) throw InvalidInputError("identity_transform: k must be >= 1");
    TransformSpec t;
    t.in_dim = k;
    t.out_dim = k;
    t.phi = [](const Vector& v) { return v; };
    t.jacobian = [k](const Vector&) { return Matrix::Identity(k, k); };
    t.a = 1.0;
    t.b = 1.0;
    return t;
}

TransformSpec linear_transform(const Matrix& m) {
    if (m.rows() < m.cols()) {
        throw InvalidInputError("linear_transform: requires out_dim >= in_dim");
    }
    const auto f = numerics::svd(m);
    if (f.rank < m.cols()) {
        throw InvalidInputError("linear_transform: matrix must have full column rank");
    }
    TransformSpec t;
    t.in_dim = static_cast<int>(m.cols());
    t.out_dim = static_cast<int>(m.rows());
    t.phi = [m](const Vector& v) -> Vector { return m * v; };
    t.jacobian = [m](const Vector&) { return m; };
    t.a = f.singular_values(m.cols() - 1) * f.singular_values(m.cols() - 1);
    t.b = f.sigma_max * f.sigma_max;
    return t;
}

TransformSpec sine_transform(int k, double c) {
    if (k < 1) throw InvalidInputError("sine_transform: k must be >= 1");
    if (!(c > 0.0 && c < 1.0)) throw InvalidInputError("sine_transform: c must be in (0, 1)");
    TransformSpec t;
    t.in_dim = k;
    t.out_dim = k;
    t.phi = [c](const Vector& v) -> Vector { return v + c * v.array().sin().matrix(); };
    t.jacobian = [c](const Vector& v) {
        Matrix j = Matrix::Zero(v.size(), v.size());
        for (Index p = 0; p < v.size(); ++p) j(p, p) = 1.0 + c * std::cos(v(p));
        return j;
    };
    t.a = (1.0 - c) * (1.0 - c);
    t.b = (1.0 + c) * (1.0 + c);
    return t;
}

Vector sine_transform_inverse(double c, const Vector& w) {
    if (!(c > 0.0 && c < 1.0)) throw InvalidInputError("sine_transform_inverse: c in (0, 1)");
    Vector v = w;
    // v + c sin(v) is strictly increasing with derivative >= 1 - c, so Newton
    // from w converges fast for every coordinate.
    for (Index p = 0; p < w.size(); ++p) {
        double x = w(p);
        for (int it = 0; it < 100; ++it) {
            const double r = x + c * std::sin(x) - w(p);
            if (std::abs(r) <= 1e-14 * std::max(1.0, std::abs(w(p)))) break;
            x -= r / (1.0 + c * std::cos(x));
        }
        v(p) = x;
    }
    return v;
}

ErmObjective compose_objective(const ErmObjective& obj, const TransformSpec& t) {
    if (obj.dim() != t.out_dim) {
        throw InvalidInputError("compose_objective: objective dim must equal transform out_dim");
    }
    std::vector<SampleLoss> composed;
    composed.reserve(static_cast<std::size_t>(obj.sample_count()));
    for (int i = 0; i < obj.sample_count(); ++i) {
        const SampleLoss& base = obj.loss(i);
        SampleLoss l;
        l.dim = t.in_dim;
        l.beta = t.b * base.beta;
        l.value = [base, phi = t.phi](const Vector& v) { return base.value(phi(v)); };
        l.gradient = [base, phi = t.phi, jac = t.jacobian](const Vector& v) -> Vector {
            return jac(v).transpose() * base.gradient(phi(v));
        };
        composed.push_back(std::move(l));
    }
    return ErmObjective(std::move(composed));
}

std::pair<double, double> composed_constants(double alpha, double lambda, double a, double b) {
    if (!(alpha > 0.0) || !(lambda > 0.0) || !(a > 0.0) || !(b >= a)) {
        throw InvalidInputError("composed_constants: need alpha, lambda, a > 0 and b >= a");
    }
    return {a * alpha, b * lambda};
}

double step_size_corollary(double eta_star, double a, double b) {
    if (!(eta_star > 0.0) || !(a > 0.0) || !(b > 0.0)) {
        throw InvalidInputError("step_size_corollary: inputs must be positive");
    }
    return (a / (b * b)) * eta_star;
}

double corollary_bound_factor(double alpha, double eta_star, double a, double b) {
    if (!(alpha > 0.0) || !(eta_star > 0.0) || !(a > 0.0) || !(b > 0.0)) {
        throw InvalidInputError("corollary_bound_factor: inputs must be positive");
    }
    const double factor = 1.0 - (a * a) / (b * b) * alpha * eta_star / 2.0;
    if (!(factor >= 0.0) || !(factor <= 1.0)) {
        throw NonContractiveError("corollary_bound_factor: factor outside [0, 1]");
    }
    return factor;
}

PlReport verify_pl_transfer(const ErmObjective& obj, const TransformSpec& t, double alpha,
                            const std::vector<Vector>& probes, double loss_floor) {
    if (!(alpha > 0.0)) throw InvalidInputError("verify_pl_transfer: alpha must be positive");
    PlReport report;
    report.pass = true;
    for (const Vector& v : probes) {
        const Vector w = t.phi(v);
        const double value = obj.value(w);
        if (value <= loss_floor) continue;
        ++report.qualifying_probes;
        const Vector g = t.jacobian(v).transpose() * obj.gradient(w);
        const double margin = g.squaredNorm() - t.a * alpha * value;
        if (margin < report.worst_margin) {
            report.worst_margin = margin;
            report.worst_probe = v;
        }
        if (margin < -1e-8 * std::max(1.0, value)) report.pass = false;
    }
    return report;
}

}  // namespace plsgd
