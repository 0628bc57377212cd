#include <doctest.h>

#include <cmath>

#include "plsgd/errors.hpp"
#include "plsgd/objective.hpp"
#include "plsgd/problems.hpp"

using namespace plsgd;

namespace {

SampleLoss half_norm2_loss(int dim) {
    SampleLoss l;
    l.dim = dim;
    l.beta = 1.0;
    l.value = [](const Vector& w) { return 0.5 * w.squaredNorm(); };
    l.gradient = [](const Vector& w) -> Vector { return w; };
    return l;
}

}  // namespace

TEST_CASE("erm_value: single half-norm loss") {
    ErmObjective obj({half_norm2_loss(2)});
    Vector w(2);
    w << 2, 0;
    CHECK(erm_value(obj, w) == doctest::Approx(2.0));
    CHECK_THROWS_AS(erm_value(obj, Vector::Zero(3)), InvalidInputError);
}

TEST_CASE("erm_value: matches direct residual computation on least squares") {
    const auto inst = gen_interpolated_least_squares(6, 9, 31);
    Rng rng = make_rng(4);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector w(9);
    for (int i = 0; i < 9; ++i) w(i) = gauss(rng);
    const double direct = (inst.x * w - inst.y).squaredNorm() / (2.0 * 6.0);
    CHECK(inst.objective->value(w) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(inst.objective->value(inst.w_star) <= 1e-12);
}

TEST_CASE("minibatch_gradient: full batch equals full gradient") {
    const auto inst = gen_interpolated_least_squares(4, 6, 2);
    Vector w = Vector::Constant(6, 0.3);
    BatchIndices batch{{0, 1, 2, 3}};
    const Vector g = minibatch_gradient(*inst.objective, w, batch);
    CHECK((g - inst.objective->gradient(w)).norm() < 1e-12);
}

TEST_CASE("minibatch_gradient: n = 1 ignores batch size") {
    ErmObjective obj({half_norm2_loss(3)});
    Vector w = Vector::Constant(3, 2.0);
    BatchIndices batch{{0, 0, 0, 0, 0}};
    CHECK((minibatch_gradient(obj, w, batch) - w).norm() < 1e-15);
    CHECK_THROWS_AS(minibatch_gradient(obj, w, BatchIndices{{}}), InvalidInputError);
}

TEST_CASE("minibatch_gradient: enumeration over n=3, m=2 averages to the full gradient") {
    const auto inst = gen_interpolated_least_squares(3, 5, 9);
    Vector w = Vector::Constant(5, -0.7);
    Vector sum = Vector::Zero(5);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            sum += minibatch_gradient(*inst.objective, w, BatchIndices{{i, j}});
        }
    }
    CHECK((sum / 9.0 - inst.objective->gradient(w)).norm() < 1e-12);
}

TEST_CASE("minibatch expectation equals full gradient: exhaustive for n <= 4, m <= 3") {
    for (int n = 2; n <= 4; ++n) {
        const auto inst = gen_interpolated_least_squares(n, n + 2, 100 + n);
        Vector w = Vector::Constant(n + 2, 0.4);
        for (int m = 1; m <= 3; ++m) {
            Vector sum = Vector::Zero(n + 2);
            const int total = static_cast<int>(std::pow(n, m));
            for (int code = 0; code < total; ++code) {
                BatchIndices batch;
                int rest = code;
                for (int j = 0; j < m; ++j) {
                    batch.indices.push_back(rest % n);
                    rest /= n;
                }
                sum += minibatch_gradient(*inst.objective, w, batch);
            }
            CHECK((sum / total - inst.objective->gradient(w)).norm() < 1e-12);
        }
    }
}

TEST_CASE("sample_batch: n = 1 always yields zeros") {
    Rng rng = make_rng(1);
    const auto batch = sample_batch(1, 3, rng);
    CHECK(batch.indices == std::vector<int>{0, 0, 0});
    CHECK_THROWS_AS(sample_batch(0, 1, rng), InvalidInputError);
}

TEST_CASE("sample_batch: empirical frequency is uniform") {
    Rng rng = make_rng(99);
    int zeros = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        if (sample_batch(2, 1, rng).indices[0] == 0) ++zeros;
    }
    const double freq = static_cast<double>(zeros) / draws;
    CHECK(freq > 0.49);
    CHECK(freq < 0.51);
}

TEST_CASE("sample_batch: deterministic for a fixed seed") {
    Rng a = make_rng(123);
    Rng b = make_rng(123);
    for (int i = 0; i < 20; ++i) {
        CHECK(sample_batch(17, 5, a).indices == sample_batch(17, 5, b).indices);
    }
}

TEST_CASE("check_interpolation: exact solution passes, perturbation fails") {
    const auto inst = gen_interpolated_least_squares(5, 8, 77);
    CHECK(check_interpolation(*inst.objective, inst.w_star, 1e-12).pass);

    Vector off = inst.w_star;
    off(0) += 1.0;
    const auto report = check_interpolation(*inst.objective, off, 1e-12);
    CHECK_FALSE(report.pass);
    CHECK(report.max_residual > 1e-12);
    CHECK(static_cast<int>(report.residuals.size()) == 5);
}

TEST_CASE("check_interpolation: single-loss problem at its minimizer") {
    ErmObjective obj({half_norm2_loss(2)});
    CHECK(check_interpolation(obj, Vector::Zero(2), 1e-12).pass);
}

TEST_CASE("check_sample_gradient_bound: scalar quadratic saturates exactly") {
    // l(w) = (1/2) beta (w - c)^2 has ||l'||^2 = 2 beta l everywhere.
    const double beta = 3.0, c = 1.5;
    SampleLoss l;
    l.dim = 1;
    l.beta = beta;
    l.value = [=](const Vector& w) { return 0.5 * beta * (w(0) - c) * (w(0) - c); };
    l.gradient = [=](const Vector& w) -> Vector {
        Vector g(1);
        g(0) = beta * (w(0) - c);
        return g;
    };
    ErmObjective obj({l});
    std::vector<Vector> probes;
    for (double x : {-3.0, 0.0, 2.0, 10.0}) {
        Vector w(1);
        w << x;
        probes.push_back(w);
    }
    const auto report = check_sample_gradient_bound(obj, probes);
    CHECK(report.pass);
    CHECK(report.worst_ratio == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("check_sample_gradient_bound: analytic beta passes, halved beta fails") {
    const auto inst = gen_interpolated_least_squares(5, 8, 13);
    const auto probes = make_probes(inst.w_star, 1000, 55);
    CHECK(check_sample_gradient_bound(*inst.objective, probes).pass);

    std::vector<SampleLoss> halved = inst.objective->losses();
    for (auto& l : halved) l.beta *= 0.5;
    ErmObjective bad(std::move(halved));
    CHECK_FALSE(check_sample_gradient_bound(bad, probes).pass);
}

TEST_CASE("per-sample losses are non-negative at random probes") {
    const auto inst = gen_interpolated_least_squares(4, 7, 21);
    const auto probes = make_probes(inst.w_star, 10000, 3);
    for (const auto& w : probes) {
        for (int i = 0; i < inst.objective->sample_count(); ++i) {
            CHECK(inst.objective->loss(i).value(w) >= 0.0);
        }
    }
}

TEST_CASE("erm value and gradient are consistent along random directions") {
    const auto inst = gen_interpolated_least_squares(6, 10, 8);
    const ErmObjective& obj = *inst.objective;
    Rng rng = make_rng(6);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Vector w(10), dir(10);
        for (int i = 0; i < 10; ++i) {
            w(i) = gauss(rng);
            dir(i) = gauss(rng);
        }
        dir.normalize();
        const double h = 1e-5 * std::max(1.0, w.norm());
        const double fd = (obj.value(w + h * dir) - obj.value(w - h * dir)) / (2.0 * h);
        const double analytic = obj.gradient(w).dot(dir);
        CHECK(std::abs(fd - analytic) <= 1e-6 * std::max(1.0, std::abs(analytic)));
    }
}
