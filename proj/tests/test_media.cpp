#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "rigidity/errors.hpp"
#include "rigidity/media.hpp"

using namespace rigidity;

namespace {

void check_gradient(const ScalarField& f, Vec2 x, double rel) {
  const double h = 1e-6;
  Vec2 fd{(f.value(x + Vec2{h, 0}) - f.value(x - Vec2{h, 0})) / (2 * h),
          (f.value(x + Vec2{0, h}) - f.value(x - Vec2{0, h})) / (2 * h)};
  Vec2 g = f.gradient(x);
  CHECK(norm(g - fd) <= rel * std::max(1.0, norm(g)));
}

}  // namespace

TEST_SUITE("media") {
  TEST_CASE("constant and radial polynomial") {
    Domain d = unit_disc();
    RefractionField one = make_medium(constant_spec(1.0), d);
    CHECK(one.n({0.3, -0.2}) == 1.0);
    CHECK(norm(one.grad_n({0.3, -0.2})) == 0.0);

    RefractionField r = make_medium(radial_spec({1.0, 0.2}), d);
    Vec2 x{0.4, -0.3};
    CHECK(r.n(x) == doctest::Approx(1.0 + 0.2 * 0.25));
    CHECK(r.grad_n(x).x == doctest::Approx(0.4 * x.x));
    CHECK(r.grad_n(x).y == doctest::Approx(0.4 * x.y));
  }

  TEST_CASE("cutoff bump equals the base on the boundary") {
    Domain d = unit_disc();
    RefractionField b = make_medium(bumps_spec(1.0, {{0.1, {0.3, 0.0}, 0.25}}, true), d);
    for (int k = 0; k < 1000; ++k) {
      double s = 2 * oracle::pi * k / 1000;
      CHECK(std::abs(b.n(d.boundary().point(s)) - 1.0) <= 1e-10);
    }
    CHECK(b.n({0.3, 0.0}) == doctest::Approx(1.1).epsilon(1e-12));
    // Without the cutoff the bump tail reaches the boundary.
    RefractionField c = make_medium(bumps_spec(1.0, {{0.1, {0.3, 0.0}, 0.25}}, false), d);
    CHECK(c.n({1.0, 0.0}) - 1.0 > 1e-5);
    CHECK(vanishes_on_boundary(b.field() + ScalarField::constant(-1.0), d));
    CHECK(!vanishes_on_boundary(c.field() + ScalarField::constant(-1.0), d));
  }

  TEST_CASE("gradients match central differences") {
    Domain d = star_shaped_domain(RadiusProfile::fourier({1.0, 0.0, 0.0, 0.1, 0.0}));
    std::vector<MediumSpec> specs{
        radial_spec({1.0, 0.2, -0.05}),
        bumps_spec(1.0, {{0.1, {0.3, 0.0}, 0.25}, {-0.05, {-0.2, 0.3}, 0.2}}, true),
        bumps_over(radial_spec({1.0, 0.2}), {{0.08, {-0.2, 0.25}, 0.2}}, true),
    };
    auto gen = oracle::rng(5);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (const auto& s : specs) {
      RefractionField n = make_medium(s, d);
      for (int k = 0; k < 50; ++k) {
        Vec2 x{u(gen), u(gen)};
        if (!d.inside(x)) continue;
        check_gradient(n.field(), x, 1e-6);
      }
    }
  }

  TEST_CASE("smoothstep is C2 with the right ends") {
    CHECK(smoothstep(-1.0) == 0.0);
    CHECK(smoothstep(0.0) == 0.0);
    CHECK(smoothstep(1.0) == 1.0);
    CHECK(smoothstep(2.0) == 1.0);
    CHECK(smoothstep(0.5) == doctest::Approx(0.5));
    CHECK(smoothstep_derivative(0.0) == 0.0);
    CHECK(smoothstep_derivative(1.0) == 0.0);
    for (double t = 0.05; t < 1.0; t += 0.1) {
      double fd = (smoothstep(t + 1e-6) - smoothstep(t - 1e-6)) / 2e-6;
      CHECK(smoothstep_derivative(t) == doctest::Approx(fd).epsilon(1e-7));
    }
  }

  TEST_CASE("non-positive media are rejected") {
    Domain d = unit_disc();
    CHECK_THROWS_AS(make_medium(constant_spec(0.0), d), NumericalError);
    try {
      make_medium(radial_spec({1.0, -1.5}), d);
      FAIL("expected NonPositive");
    } catch (const NumericalError& e) {
      CHECK(e.kind() == ErrorKind::NonPositive);
    }
    RefractionField one = make_medium(constant_spec(1.0), d);
    ScalarField f = ScalarField::constant(1.0);
    CHECK_THROWS_AS(one.perturbed(-2.0, f, d), NumericalError);
    CHECK(one.perturbed(0.5, f, d).n({0.1, 0.1}) == doctest::Approx(1.5));
    CHECK(one.scaled(3.0).n({0.1, 0.1}) == doctest::Approx(3.0));
  }

  TEST_CASE("grid spline reproduces smooth data") {
    std::ostringstream csv;
    csv << "x,y,n\n";
    auto fn = [](double x, double y) { return 1.0 + 0.1 * std::sin(x) * std::cos(y) + 0.05 * x * x; };
    const int N = 61;
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) {
        double x = -1.2 + 2.4 * i / (N - 1), y = -1.2 + 2.4 * j / (N - 1);
        csv << x << "," << y << "," << fn(x, y) << "\n";
      }
    GridSamples g = parse_grid_csv(csv.str());
    CHECK(g.nx == N);
    CHECK(g.ny == N);
    MediumSpec s;
    s.kind = MediumKind::grid_spline;
    s.grid = g;
    RefractionField n = make_medium(s, unit_disc());
    auto gen = oracle::rng(9);
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    for (int k = 0; k < 40; ++k) {
      Vec2 x{u(gen), u(gen)};
      CHECK(std::abs(n.n(x) - fn(x.x, x.y)) < 1e-5);
      check_gradient(n.field(), x, 1e-6);
    }
  }

  TEST_CASE("grid spline input errors") {
    CHECK_THROWS_AS(parse_grid_csv("x,y,n\n0,0,1\n1,0,1\n0,1\n"), ConfigError);
    CHECK_THROWS_AS(parse_grid_csv("x,y,n\n0,0,1\n1,0,1\n3,0,1\n0,1,1\n1,1,1\n3,1,1\n"), ConfigError);
    // A grid that does not cover the domain.
    MediumSpec s;
    s.kind = MediumKind::grid_spline;
    s.grid = parse_grid_csv("0,0,1\n0.5,0,1\n1,0,1\n0,0.5,1\n0.5,0.5,1\n1,0.5,1\n0,1,1\n0.5,1,1\n1,1,1\n");
    try {
      make_medium(s, unit_disc());
      FAIL("expected OutOfClass");
    } catch (const NumericalError& e) {
      CHECK(e.kind() == ErrorKind::OutOfClass);
    }
  }

  TEST_CASE("non-trapping: straight chords") {
    Domain d = unit_disc();
    NonTrappingReport r = non_trapping_check(make_medium(constant_spec(1.0), d), d, 1000);
    CHECK(r.ok);
    CHECK(r.max_path_length <= 2.0 + 1e-9);
    CHECK(r.trapped == 0);
  }

  TEST_CASE("non-trapping: radial medium") {
    Domain d = unit_disc();
    NonTrappingReport r = non_trapping_check(make_medium(radial_spec({1.0, 0.2}), d), d, 200);
    CHECK(r.ok);
    CHECK(r.worst_exit_cosine > 0.01);
  }

  TEST_CASE("non-trapping: low-index well is non-trapping, a high-index lens traps") {
    Domain d = unit_disc();
    // r n(r) is increasing for the well, so there are no circular orbits.
    NonTrappingReport well = non_trapping_check(make_medium(bumps_spec(1.0, {{-0.9, {0, 0}, 0.1}}, false), d), d, 200);
    CHECK(well.ok);
    NonTrappingReport lens = non_trapping_check(make_medium(bumps_spec(1.0, {{3.0, {0, 0}, 0.3}}, false), d), d, 200);
    CHECK(!lens.ok);
    CHECK(lens.trapped + lens.tangent_exits > 0);
  }
}
