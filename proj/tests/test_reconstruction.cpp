#include <doctest.h>

#include "oracles.hpp"
#include "rigidity/errors.hpp"
#include "rigidity/reconstruction.hpp"

using namespace rigidity;

TEST_SUITE("reconstruction") {
  TEST_CASE("basis elements vanish on the boundary") {
    Domain d = unit_disc();
    ModelParameterization p = ModelParameterization::radial(ScalarField::constant(1.0), 3, d);
    CHECK(p.size() == 3);
    for (const auto& b : p.basis()) CHECK(vanishes_on_boundary(b, d));
    // b_2 = (1 - r^2) r^2
    CHECK(p.basis()[1].value({0.5, 0.0}) == doctest::Approx(0.75 * 0.25));
    CHECK_THROWS_AS(ModelParameterization(ScalarField::constant(1.0), {ScalarField::constant(1.0)}, {}, d),
                    NumericalError);
  }

  TEST_CASE("zero coefficients reproduce the base hodograph bitwise") {
    Domain d = unit_disc();
    ScalarField base = ScalarField::radial_polynomial({1.0, 0.2});
    ModelParameterization p = ModelParameterization::radial(base, 2, d);
    RefractionField n0 = RefractionField::from_field(base, d);
    TomographyProblem prob = make_problem(d, p, n0, 12, 12);
    HodographTable f = forward_model(prob, {0.0, 0.0});
    HodographTable ref = build_hodograph(n0, d, 12, 12);
    REQUIRE(f.tau.size() == ref.tau.size());
    for (std::size_t k = 0; k < f.tau.size(); ++k) CHECK(f.tau[k] == ref.tau[k]);
  }

  TEST_CASE("coefficients making n non-positive") {
    Domain d = unit_disc();
    ModelParameterization p = ModelParameterization::radial(ScalarField::constant(1.0), 2, d);
    try {
      p.medium({-5.0, 0.0}, d);
      FAIL("expected NonPositive");
    } catch (const NumericalError& e) {
      CHECK(e.kind() == ErrorKind::NonPositive);
    }
  }

  TEST_CASE("Jacobian columns match finite differences") {
    Domain d = unit_disc();
    ModelParameterization p = ModelParameterization::radial(ScalarField::constant(1.0), 3, d);
    TomographyProblem prob = make_problem(d, p, p.medium({0.05, 0.0, 0.0}, d), 12, 12);
    std::vector<double> errs = jacobian_fd_errors(prob, {0.02, 0.0, 0.0}, 1e-4);
    for (double e : errs) CHECK(e < 5e-4);
  }

  TEST_CASE("truth equal to the base converges immediately") {
    Domain d = unit_disc();
    ModelParameterization p = ModelParameterization::radial(ScalarField::constant(1.0), 3, d);
    TomographyProblem prob = make_problem(d, p, p.medium({0.0, 0.0, 0.0}, d), 12, 12);
    GaussNewtonResult r = gauss_newton_solve(prob, 8, 1e-6);
    CHECK(r.iterations <= 1);
    for (double c : r.coefficients) CHECK(std::abs(c) < 1e-8);
    CHECK(r.residual_history.back() < 1e-9);
  }

  TEST_CASE("bump basis recovers an in-span truth") {
    Domain d = unit_disc();
    std::vector<Bump> shapes{{1.0, {0.3, 0.0}, 0.3}, {1.0, {-0.3, 0.2}, 0.3}};
    ModelParameterization p = ModelParameterization::bumps(ScalarField::constant(1.0), shapes, d);
    TomographyProblem prob = make_problem(d, p, p.medium({0.06, -0.04}, d), 12, 12);
    GaussNewtonResult r = gauss_newton_solve(prob, 8, 1e-8);
    CHECK(r.coefficients[0] == doctest::Approx(0.06).epsilon(1e-4));
    CHECK(r.coefficients[1] == doctest::Approx(-0.04).epsilon(1e-4));
    for (std::size_t k = 1; k < r.residual_history.size(); ++k)
      CHECK(r.residual_history[k] <= r.residual_history[k - 1] * 1.0000001 + 1e-12);
  }

  TEST_CASE("rank deficiency") {
    Domain d = unit_disc();
    ScalarField b = ScalarField::radial_polynomial({1.0, -1.0});
    ModelParameterization p(ScalarField::constant(1.0), {b, b}, {"a", "b"}, d);
    TomographyProblem prob = make_problem(d, p, p.medium({0.05, 0.0}, d), 10, 10);
    prob.lambda_reg = 0.0;
    try {
      gauss_newton_solve(prob, 4, 1e-6);
      FAIL("expected RankDeficient");
    } catch (const NumericalError& e) {
      CHECK(e.kind() == ErrorKind::RankDeficient);
    }
  }
}
