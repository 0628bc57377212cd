#include <doctest.h>

#include <cmath>

#include "plsgd/constants.hpp"
#include "plsgd/errors.hpp"
#include "plsgd/numerics.hpp"
#include "plsgd/oracle.hpp"
#include "plsgd/problems.hpp"

using namespace plsgd;

namespace {

// l(w) = (1/2) mu ||w||^2 satisfies ||grad||^2 = 2 mu l exactly.
ErmObjective scaled_quadratic(int dim, double mu) {
    SampleLoss l;
    l.dim = dim;
    l.beta = mu;
    l.value = [mu](const Vector& w) { return 0.5 * mu * w.squaredNorm(); };
    l.gradient = [mu](const Vector& w) -> Vector { return mu * w; };
    return ErmObjective({l});
}

}  // namespace

TEST_CASE("estimate_pl_constant: exact for an isotropic quadratic") {
    const auto obj = scaled_quadratic(3, 2.5);
    const auto probes = make_probes(Vector::Zero(3), 500, 7);
    const double alpha_hat = estimate_pl_constant(obj, probes, 1e-14);
    CHECK(alpha_hat == doctest::Approx(2.0 * 2.5).epsilon(1e-10));
}

TEST_CASE("estimate_pl_constant: rejects an all-zero probe set") {
    const auto obj = scaled_quadratic(2, 1.0);
    std::vector<Vector> probes(10, Vector::Zero(2));
    CHECK_THROWS_AS(estimate_pl_constant(obj, probes, 1e-14), InsufficientProbesError);
}

TEST_CASE("estimate_pl_constant: upper-bounds the analytic least-squares constant") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
        const auto inst = gen_interpolated_least_squares(8, 14, seed);
        const auto probes = make_probes(inst.w_star, 2000, seed + 100);
        Vector worst;
        const double alpha_hat = estimate_pl_constant(*inst.objective, probes, 1e-14, &worst);
        CHECK(alpha_hat >= inst.constants.alpha * (1.0 - 1e-10));
        CHECK(worst.size() == inst.w_star.size());
    }
}

TEST_CASE("estimate_pl_constant: agrees with a brute-force grid in 2D") {
    // L(w) = (1/4)(w1^2 + 4 w2^2): ||grad||^2 / L has infimum 2 along w1.
    const auto inst = gen_interpolated_least_squares(2, 2, 0, {1.0, 2.0});
    // Directions along the small singular vector attain ratio alpha exactly.
    numerics::LinearFactorization fact = numerics::svd(inst.x);
    std::vector<Vector> probes;
    for (double s : {-2.0, -1.0, 1.0, 2.0}) {
        probes.push_back(inst.w_star + s * fact.v.col(1));
        probes.push_back(inst.w_star + s * fact.v.col(0));
    }
    const double alpha_hat = estimate_pl_constant(*inst.objective, probes, 1e-14);
    CHECK(alpha_hat == doctest::Approx(inst.constants.alpha).epsilon(1e-9));
}

TEST_CASE("analytic_constants_least_squares: prescribed spectrum gives exact values") {
    // X is 3 x 6 with singular values {1, 2, 3}: lambda = 9/3, alpha = 2/3.
    const auto inst = gen_interpolated_least_squares(3, 6, 11, {3.0, 1.0, 2.0});
    CHECK(inst.constants.lambda == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(inst.constants.alpha == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(inst.constants.alpha_source == Source::analytic);
    CHECK(inst.constants.lambda_source == Source::analytic);
    CHECK(inst.constants.beta_source == Source::analytic);
    double max_row = 0.0;
    for (int i = 0; i < 3; ++i) max_row = std::max(max_row, inst.x.row(i).squaredNorm());
    CHECK(inst.constants.beta == doctest::Approx(max_row).epsilon(1e-12));
}

TEST_CASE("analytic_constants_least_squares: rejects y outside the range of X") {
    Matrix x(2, 3);
    x << 1, 0, 0,
         0, 1, 0;
    Matrix xt = x.transpose();  // 3 x 2, rank 2, range misses e3... use tall X
    Vector y(3);
    y << 0, 0, 1;
    const auto fact = numerics::svd(xt);
    CHECK_THROWS_AS(analytic_constants_least_squares(fact, y), NotInterpolatedError);
}

TEST_CASE("estimate_smoothness: recovers the top Hessian eigenvalue of a quadratic") {
    const auto inst = gen_interpolated_least_squares(4, 6, 17);
    const auto probes = make_probes(inst.w_star, 20, 9);
    const double lambda_hat = estimate_smoothness(*inst.objective, probes);
    CHECK(lambda_hat == doctest::Approx(inst.constants.lambda).epsilon(1e-4));
    CHECK(lambda_hat <= inst.constants.lambda * (1.0 + 1e-4));
}

TEST_CASE("verify_pl: analytic alpha passes, inflated alpha fails") {
    const auto inst = gen_interpolated_least_squares(6, 10, 23);
    const auto probes = make_probes(inst.w_star, 2000, 42);
    CHECK(verify_pl(*inst.objective, inst.constants.alpha, probes, 1e-14).pass);

    // The PL ratio of least squares never exceeds 2 lambda, so 5 lambda must fail.
    const auto bad = verify_pl(*inst.objective, 5.0 * inst.constants.lambda, probes, 1e-14);
    CHECK_FALSE(bad.pass);
    CHECK(bad.worst_margin < 0.0);
    CHECK(bad.worst_probe.size() == 10);
}

TEST_CASE("verify_pl: counts qualifying probes") {
    const auto obj = scaled_quadratic(2, 1.0);
    std::vector<Vector> probes(5, Vector::Zero(2));
    probes.push_back(Vector::Constant(2, 1.0));
    const auto report = verify_pl(obj, 1.0, probes, 1e-14);
    CHECK(report.pass);
    CHECK(report.qualifying_probes == 1);
}

TEST_CASE("make_probes: deterministic, correct count, scales with w_star") {
    Vector w_star = Vector::Constant(4, 100.0);
    const auto a = make_probes(w_star, 30, 5);
    const auto b = make_probes(w_star, 30, 5);
    REQUIRE(a.size() == 30);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK((a[i] - b[i]).norm() == 0.0);

    const auto c = make_probes(w_star, 30, 6);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i) any_diff = any_diff || (a[i] - c[i]).norm() > 0;
    CHECK(any_diff);

    // Some probes must land near w_star (radius 0.1 scale) and some far from it.
    double min_dist = 1e300, max_dist = 0.0;
    for (const auto& p : a) {
        min_dist = std::min(min_dist, (p - w_star).norm());
        max_dist = std::max(max_dist, (p - w_star).norm());
    }
    CHECK(min_dist < 0.5 * w_star.norm());
    CHECK(max_dist > 0.5 * w_star.norm());
}

TEST_CASE("PL estimate agrees with a dense grid oracle on a 1D quadratic") {
    // f(w) = w^2 has ||f'||^2 / f = 4 everywhere.
    const auto obj = scaled_quadratic(1, 2.0);  // value = w^2, grad = 2w
    const auto probes = make_probes(Vector::Zero(1), 200, 1);
    const double alpha_hat = estimate_pl_constant(obj, probes, 1e-12);

    Vector lo(1), hi(1);
    lo << -2.0;
    hi << 2.0;
    const double alpha_grid =
        oracle::grid_pl_constant([](const Vector& w) { return w(0) * w(0); }, lo, hi, 2001, 1e-6);
    CHECK(alpha_hat == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(alpha_grid == doctest::Approx(4.0).epsilon(1e-4));
}
