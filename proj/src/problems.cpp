#include "plsgd/problems.hpp"

#include <cmath>
#include <string>

#include "plsgd/errors.hpp"
#include "plsgd/numerics.hpp"

namespace plsgd {

namespace {

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) m(i, j) = gauss(rng);
    }
    return m;
}

Vector gaussian_vector(Index size, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(size);
    for (Index i = 0; i < size; ++i) v(i) = gauss(rng);
    return v;
}

Matrix random_orthogonal(Index size, Rng& rng) {
    Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(size, size, rng));
    return qr.householderQ() * Matrix::Identity(size, size);
}

// Replace the singular values of a Gaussian draw by a prescribed spectrum.
Matrix matrix_with_spectrum(Index rows, Index cols, const std::vector<double>& spectrum,
                            Rng& rng) {
    Matrix g = gaussian_matrix(rows, cols, rng);
    Eigen::JacobiSVD<Matrix> solver(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix sigma = Matrix::Zero(rows, cols);
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        sigma(static_cast<Index>(i), static_cast<Index>(i)) = spectrum[i];
    }
    return solver.matrixU() * sigma * solver.matrixV().transpose();
}

SampleLoss least_squares_sample(const Vector& x_row, double y_value) {
    SampleLoss l;
    l.dim = static_cast<int>(x_row.size());
    l.beta = x_row.squaredNorm();
    l.value = [x_row, y_value](const Vector& w) {
        const double r = x_row.dot(w) - y_value;
        return 0.5 * r * r;
    };
    l.gradient = [x_row, y_value](const Vector& w) -> Vector {
        return (x_row.dot(w) - y_value) * x_row;
    };
    return l;
}

}  // namespace

ProblemInstance gen_interpolated_least_squares(int n, int d, std::uint64_t seed,
                                               const std::vector<double>& spectrum) {
    if (n < 1 || d < n) {
        throw InvalidInputError("gen_interpolated_least_squares: need 1 <= n <= d");
    }
    if (!spectrum.empty() && static_cast<int>(spectrum.size()) != n) {
        throw InvalidInputError(
            "gen_interpolated_least_squares: spectrum length must equal min(n, d) = n");
    }
    for (double s : spectrum) {
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw InvalidInputError(
                "gen_interpolated_least_squares: spectrum values must be positive and finite");
        }
    }

    Rng rng = make_rng(seed);
    ProblemInstance inst;
    inst.kind = ProblemKind::least_squares;
    inst.x = spectrum.empty() ? gaussian_matrix(n, d, rng)
                              : matrix_with_spectrum(n, d, spectrum, rng);

    Vector w_star = gaussian_vector(d, rng);
    w_star.normalize();
    inst.w_star = w_star;
    inst.y = inst.x * w_star;

    std::vector<SampleLoss> losses;
    losses.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        losses.push_back(least_squares_sample(inst.x.row(i).transpose(), inst.y(i)));
    }
    inst.objective = std::make_shared<ErmObjective>(std::move(losses));

    inst.x_fact = std::make_shared<numerics::LinearFactorization>(numerics::svd(inst.x));
    inst.constants = analytic_constants_least_squares(*inst.x_fact, inst.y);

    validate_instance(inst);
    return inst;
}

ProblemInstance gen_composed_linear(int n, int d, int k, int rank, std::uint64_t seed) {
    if (k < 1 || d < k || rank < 1 || rank > k) {
        throw InvalidInputError("gen_composed_linear: need 1 <= rank <= k <= d");
    }
    if (n < k) {
        throw InvalidInputError("gen_composed_linear: need n >= k for strong convexity");
    }

    Rng rng = make_rng(seed);

    // A = U Sigma V^T with a prescribed spectrum so sigma_min/sigma_max are exact.
    const Matrix u_orth = random_orthogonal(k, rng);
    const Matrix v_orth = random_orthogonal(d, rng);
    Matrix sigma = Matrix::Zero(k, d);
    for (int i = 0; i < rank; ++i) {
        sigma(i, i) = rank > 1 ? 1.0 + static_cast<double>(i) / (rank - 1) : 1.0;
    }
    const Matrix a = u_orth * sigma * v_orth.transpose();

    auto p = std::make_shared<ComposedLinearProblem>();
    p->factorization = numerics::svd(a);

    // z* must lie in Range(A); defining it through a pre-image makes w_star exact.
    Vector w_star = gaussian_vector(d, rng);
    w_star.normalize();
    p->w_star = w_star;
    p->z_star = a * w_star;

    // l~_i(z) = (1/2)(u_i^T (z - z*))^2 with directions spanning R^k.
    Matrix dirs = gaussian_matrix(n, k, rng);
    Matrix h_tilde = Matrix::Zero(k, k);
    std::vector<SampleLoss> composed;
    composed.reserve(static_cast<std::size_t>(n));
    p->tilde_losses.reserve(static_cast<std::size_t>(n));
    const double smax2 = p->factorization.sigma_max * p->factorization.sigma_max;
    for (int i = 0; i < n; ++i) {
        const Vector u_i = dirs.row(i).transpose();
        h_tilde += u_i * u_i.transpose() / static_cast<double>(n);

        SampleLoss tilde;
        tilde.dim = k;
        tilde.beta = u_i.squaredNorm();
        const Vector z_star = p->z_star;
        tilde.value = [u_i, z_star](const Vector& z) {
            const double r = u_i.dot(z - z_star);
            return 0.5 * r * r;
        };
        tilde.gradient = [u_i, z_star](const Vector& z) -> Vector {
            return u_i.dot(z - z_star) * u_i;
        };
        p->tilde_losses.push_back(tilde);

        SampleLoss l;
        l.dim = d;
        l.beta = smax2 * tilde.beta;
        l.value = [tilde, a](const Vector& w) { return tilde.value(a * w); };
        l.gradient = [tilde, a](const Vector& w) -> Vector {
            return a.transpose() * tilde.gradient(a * w);
        };
        composed.push_back(std::move(l));
    }
    p->objective = std::make_unique<ErmObjective>(std::move(composed));

    Eigen::SelfAdjointEigenSolver<Matrix> eig(h_tilde);
    p->tilde_alpha = eig.eigenvalues().minCoeff();
    p->tilde_lambda = eig.eigenvalues().maxCoeff();
    p->tilde_beta = dirs.rowwise().squaredNorm().maxCoeff();
    if (!(p->tilde_alpha > 0.0)) {
        throw NumericalFailureError("gen_composed_linear: directions failed to span R^k");
    }

    ProblemInstance inst;
    inst.kind = ProblemKind::composed_linear;
    inst.objective = std::shared_ptr<ErmObjective>(p, p->objective.get());
    inst.w_star = p->w_star;
    inst.constants.alpha =
        pl_constant_from_composition(p->tilde_alpha, p->factorization.sigma_min_nonzero);
    inst.constants.alpha_source = Source::analytic;
    inst.constants.lambda = p->tilde_lambda * smax2;
    inst.constants.lambda_source = Source::analytic;
    inst.constants.beta = smax2 * p->tilde_beta;
    inst.constants.beta_source = Source::analytic;
    inst.linmap = std::move(p);

    validate_instance(inst);
    return inst;
}

ProblemInstance gen_composed_nonlinear(const ProblemInstance& base, double c) {
    if (base.kind != ProblemKind::least_squares || !base.objective) {
        throw InvalidInputError("gen_composed_nonlinear: base must be a least-squares instance");
    }
    if (!(c > 0.0 && c < 1.0)) {
        throw InvalidInputError("gen_composed_nonlinear: c must be in (0, 1)");
    }

    ProblemInstance inst;
    inst.kind = ProblemKind::composed_nonlinear;
    inst.transform = sine_transform(base.objective->dim(), c);
    inst.objective =
        std::make_shared<ErmObjective>(compose_objective(*base.objective, *inst.transform));
    inst.w_star = sine_transform_inverse(c, base.w_star);
    inst.base = std::make_shared<ProblemInstance>(base);

    // PL transfer a * alpha is exact (chain rule); b * lambda is recorded but
    // only an extrapolation for a non-affine map, hence tagged estimated.
    inst.constants.alpha = inst.transform->a * base.constants.alpha;
    inst.constants.alpha_source = Source::analytic;
    inst.constants.lambda = inst.transform->b * base.constants.lambda;
    inst.constants.lambda_source = Source::estimated;
    inst.constants.beta = inst.transform->b * base.constants.beta;
    inst.constants.beta_source = Source::analytic;

    validate_instance(inst);
    return inst;
}

void validate_instance(const ProblemInstance& instance, int probe_count,
                       std::uint64_t probe_seed) {
    const ErmObjective& obj = *instance.objective;
    const std::vector<Vector> probes = make_probes(instance.w_star, probe_count, probe_seed);
    const double reference = obj.value(probes.front());
    const double scale = std::max(1.0, reference);

    const auto interp = check_interpolation(obj, instance.w_star, 1e-12 * scale);
    if (!interp.pass) {
        throw NumericalFailureError("validate_instance: interpolation check failed, max residual " +
                                    std::to_string(interp.max_residual));
    }

    const auto pl = verify_pl(obj, instance.constants.alpha, probes, 1e-12 * scale);
    if (!pl.pass) {
        throw NumericalFailureError("validate_instance: PL verification failed, margin " +
                                    std::to_string(pl.worst_margin));
    }

    const auto bound = check_sample_gradient_bound(obj, probes);
    if (!bound.pass) {
        throw NumericalFailureError("validate_instance: sample gradient bound failed, ratio " +
                                    std::to_string(bound.worst_ratio));
    }

    // Analytic gradients against central differences at a handful of probes.
    numerics::ScalarFn value_fn = [&obj](const Vector& w) { return obj.value(w); };
    const int fd_probes = std::min<int>(10, static_cast<int>(probes.size()));
    for (int i = 0; i < fd_probes; ++i) {
        const Vector g = obj.gradient(probes[static_cast<std::size_t>(i)]);
        const Vector fd =
            numerics::finite_difference_gradient(value_fn, probes[static_cast<std::size_t>(i)]);
        if ((g - fd).norm() > 1e-6 * std::max(1.0, g.norm())) {
            throw NumericalFailureError("validate_instance: gradient disagrees with differences");
        }
    }
}

}  // namespace plsgd
