#include "plsgd/numerics.hpp"

#include <cmath>

#include "plsgd/errors.hpp"

namespace plsgd::numerics {

double rank_tolerance(double sigma_max, Index rows, Index cols) {
    return 1e-10 * sigma_max * static_cast<double>(std::max(rows, cols));
}

LinearFactorization svd(const Matrix& a) {
    if (a.rows() < 1 || a.cols() < 1) {
        throw InvalidInputError("svd: matrix must have at least one row and column");
    }
    if (!a.allFinite()) {
        throw InvalidInputError("svd: matrix has non-finite entries");
    }

    Eigen::JacobiSVD<Matrix> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);

    LinearFactorization f;
    f.a = a;
    f.u = solver.matrixU();
    f.v = solver.matrixV();
    f.singular_values = solver.singularValues();
    f.sigma_max = f.singular_values.size() > 0 ? f.singular_values(0) : 0.0;

    const double tol = rank_tolerance(f.sigma_max, a.rows(), a.cols());
    f.rank = 0;
    for (Index i = 0; i < f.singular_values.size(); ++i) {
        if (f.singular_values(i) > tol) ++f.rank;
    }
    f.sigma_min_nonzero = f.rank > 0 ? f.singular_values(f.rank - 1) : 0.0;

    // pinv = V Sigma^+ U^T, inverting only the singular values above the cutoff.
    Matrix sigma_pinv = Matrix::Zero(a.cols(), a.rows());
    for (Index i = 0; i < f.rank; ++i) {
        sigma_pinv(i, i) = 1.0 / f.singular_values(i);
    }
    f.pinv = f.v * sigma_pinv * f.u.transpose();
    return f;
}

Vector project_range_pinv(const LinearFactorization& f, const Vector& w) {
    if (w.size() != f.a.cols()) {
        throw InvalidInputError("project_range_pinv: vector dimension does not match cols(A)");
    }
    return f.pinv * (f.a * w);
}

double default_fd_step(const Vector& w) { return 1e-5 * std::max(1.0, w.norm()); }

Vector finite_difference_gradient(const ScalarFn& f, const Vector& w, double h) {
    if (h <= 0.0) h = default_fd_step(w);
    Vector g(w.size());
    Vector probe = w;
    for (Index p = 0; p < w.size(); ++p) {
        probe(p) = w(p) + h;
        const double fp = f(probe);
        probe(p) = w(p) - h;
        const double fm = f(probe);
        probe(p) = w(p);
        if (!std::isfinite(fp) || !std::isfinite(fm)) {
            throw NumericalFailureError("finite_difference_gradient: non-finite function value");
        }
        g(p) = (fp - fm) / (2.0 * h);
    }
    return g;
}

SpectralNormEstimate hessian_spectral_norm_estimate(const ScalarFn& f, const GradientFn& grad,
                                                    const Vector& w, int iters,
                                                    std::uint64_t seed) {
    (void)f;
    const double h = default_fd_step(w);
    Rng rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Vector v(w.size());
    for (Index i = 0; i < v.size(); ++i) v(i) = gauss(rng);
    v.normalize();

    SpectralNormEstimate est;
    double prev = 0.0;
    for (int it = 0; it < iters; ++it) {
        Vector hv = (grad(w + h * v) - grad(w - h * v)) / (2.0 * h);
        if (!hv.allFinite()) {
            throw NumericalFailureError("hessian_spectral_norm_estimate: non-finite Hv product");
        }
        const double norm = hv.norm();
        est.iterations = it + 1;
        if (norm == 0.0) {
            est.value = 0.0;
            est.converged = true;
            return est;
        }
        est.value = norm;
        v = hv / norm;
        if (it > 0 && std::abs(est.value - prev) <= 1e-8 * std::max(1.0, est.value)) {
            est.converged = true;
            return est;
        }
        prev = est.value;
    }
    return est;
}

SpectralNormEstimate hessian_spectral_norm_estimate(const ScalarFn& f, const Vector& w,
                                                    int iters, std::uint64_t seed) {
    GradientFn grad = [&f](const Vector& x) { return finite_difference_gradient(f, x); };
    return hessian_spectral_norm_estimate(f, grad, w, iters, seed);
}

}  // namespace plsgd::numerics
