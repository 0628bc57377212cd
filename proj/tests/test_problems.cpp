#include <doctest.h>

#include <cmath>

#include "plsgd/errors.hpp"
#include "plsgd/numerics.hpp"
#include "plsgd/problems.hpp"

using namespace plsgd;

TEST_CASE("gen_interpolated_least_squares: shape, interpolation, determinism") {
    const auto a = gen_interpolated_least_squares(7, 12, 99);
    CHECK(a.kind == ProblemKind::least_squares);
    CHECK(a.x.rows() == 7);
    CHECK(a.x.cols() == 12);
    CHECK(a.objective->sample_count() == 7);
    CHECK(a.objective->dim() == 12);
    // y = X w* is constructed by multiplication, so the fit is exact in floating
    // point; the per-sample dot products may still round differently than the
    // matrix product by a few ulps.
    CHECK((a.x * a.w_star - a.y).norm() == 0.0);
    CHECK(a.objective->value(a.w_star) < 1e-28);

    const auto b = gen_interpolated_least_squares(7, 12, 99);
    CHECK((a.x - b.x).norm() == 0.0);
    CHECK((a.w_star - b.w_star).norm() == 0.0);

    const auto c = gen_interpolated_least_squares(7, 12, 100);
    CHECK((a.x - c.x).norm() > 0.0);

    CHECK_THROWS_AS(gen_interpolated_least_squares(12, 7, 1), InvalidInputError);
    CHECK_THROWS_AS(gen_interpolated_least_squares(0, 7, 1), InvalidInputError);
}

TEST_CASE("gen_interpolated_least_squares: prescribed spectrum is honored") {
    const std::vector<double> spectrum = {0.5, 1.5, 4.0};
    const auto inst = gen_interpolated_least_squares(3, 8, 42, spectrum);
    const auto fact = numerics::svd(inst.x);
    CHECK(fact.singular_values(0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(fact.singular_values(1) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(fact.singular_values(2) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(inst.constants.lambda == doctest::Approx(16.0 / 3.0).epsilon(1e-12));
    CHECK(inst.constants.alpha == doctest::Approx(2.0 * 0.25 / 3.0).epsilon(1e-12));

    CHECK_THROWS_AS(gen_interpolated_least_squares(3, 8, 42, {1.0, 2.0}), InvalidInputError);
    CHECK_THROWS_AS(gen_interpolated_least_squares(3, 8, 42, {1.0, 2.0, -1.0}),
                    InvalidInputError);
}

TEST_CASE("least-squares per-sample beta equals the squared row norm") {
    const auto inst = gen_interpolated_least_squares(5, 9, 7);
    for (int i = 0; i < 5; ++i) {
        CHECK(inst.objective->loss(i).beta ==
              doctest::Approx(inst.x.row(i).squaredNorm()).epsilon(1e-13));
    }
}

TEST_CASE("gen_composed_nonlinear: constants transfer and sources") {
    const auto base = gen_interpolated_least_squares(5, 10, 3);
    const auto inst = gen_composed_nonlinear(base, 0.5);
    CHECK(inst.kind == ProblemKind::composed_nonlinear);
    REQUIRE(inst.transform.has_value());
    CHECK(inst.transform->a == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(inst.transform->b == doctest::Approx(2.25).epsilon(1e-15));
    CHECK(inst.constants.alpha ==
          doctest::Approx(0.25 * base.constants.alpha).epsilon(1e-13));
    CHECK(inst.constants.lambda ==
          doctest::Approx(2.25 * base.constants.lambda).epsilon(1e-13));
    CHECK(inst.constants.alpha_source == Source::analytic);
    CHECK(inst.constants.lambda_source == Source::estimated);

    // w_star maps to the base minimizer under phi and interpolates the composition.
    REQUIRE(inst.base);
    CHECK((inst.transform->phi(inst.w_star) - inst.base->w_star).norm() <
          1e-10 * std::max(1.0, inst.base->w_star.norm()));
    CHECK(inst.objective->value(inst.w_star) < 1e-20);

    CHECK_THROWS_AS(gen_composed_nonlinear(base, 1.5), InvalidInputError);
}

TEST_CASE("gen_composed_linear: instance-level constants and kind") {
    const auto inst = gen_composed_linear(14, 22, 7, 5, 9);
    CHECK(inst.kind == ProblemKind::composed_linear);
    REQUIRE(inst.linmap);
    CHECK(inst.objective->dim() == 22);
    CHECK(inst.objective->sample_count() == 14);
    CHECK(inst.constants.alpha ==
          doctest::Approx(pl_constant_from_composition(
                              inst.linmap->tilde_alpha,
                              inst.linmap->factorization.sigma_min_nonzero))
              .epsilon(1e-13));
    CHECK(inst.objective->value(inst.w_star) < 1e-20);

    const auto again = gen_composed_linear(14, 22, 7, 5, 9);
    CHECK((inst.w_star - again.w_star).norm() == 0.0);
    CHECK((inst.linmap->factorization.a - again.linmap->factorization.a).norm() == 0.0);
}

TEST_CASE("validate_instance: accepts every generator and rejects a corrupted alpha") {
    validate_instance(gen_interpolated_least_squares(6, 11, 1));
    validate_instance(gen_composed_nonlinear(gen_interpolated_least_squares(4, 8, 2), 0.5));
    validate_instance(gen_composed_linear(12, 18, 6, 5, 3));

    auto bad = gen_interpolated_least_squares(6, 11, 1);
    bad.constants.alpha *= 10.0;
    CHECK_THROWS_AS(validate_instance(bad), NumericalFailureError);
}

TEST_CASE("validate_instance: rejects a shifted interpolation point") {
    auto inst = gen_interpolated_least_squares(6, 11, 4);
    inst.w_star.array() += 0.1;
    CHECK_THROWS_AS(validate_instance(inst), NumericalFailureError);
}

TEST_CASE("generators cover a seed sweep without validation failures") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto ls = gen_interpolated_least_squares(8, 16, seed);
        CHECK(ls.constants.alpha > 0.0);
        CHECK(ls.constants.alpha <= 2.0 * ls.constants.lambda + 1e-12);
        CHECK(ls.constants.beta >= ls.constants.lambda - 1e-12);

        const auto nl = gen_composed_nonlinear(ls, 0.3);
        CHECK(nl.constants.alpha > 0.0);

        const auto cl = gen_composed_linear(10, 15, 5, 4, seed);
        CHECK(cl.constants.alpha > 0.0);
    }
}
