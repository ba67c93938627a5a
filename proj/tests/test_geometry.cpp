#include <doctest.h>

#include "oracles.hpp"
#include "rigidity/geometry.hpp"

using namespace rigidity;

TEST_SUITE("geometry") {
  TEST_CASE("unit disc boundary") {
    Domain d = unit_disc();
    const BoundaryCurve& c = d.boundary();
    CHECK(c.total_length() == doctest::Approx(2.0 * oracle::pi).epsilon(1e-14));
    CHECK(c.point(0.0).x == doctest::Approx(1.0));
    CHECK(std::abs(c.point(0.0).y) < 1e-15);
    Vec2 nu = c.inward_conormal(oracle::pi);
    CHECK(nu.x == doctest::Approx(1.0));
    CHECK(std::abs(nu.y) < 1e-12);
    CHECK(d.is_unit_disc());
  }

  TEST_CASE("direction classes at (1,0)") {
    Domain d = unit_disc();
    CHECK(d.classify_direction(0.0, oracle::pi) == DirectionClass::incoming);
    CHECK(d.conormal_cosine(0.0, oracle::pi) == doctest::Approx(1.0));
    CHECK(d.classify_direction(0.0, 0.0) == DirectionClass::outgoing);
    CHECK(d.classify_direction(0.0, oracle::pi / 2) == DirectionClass::tangent);
  }

  TEST_CASE("constant profile reproduces the disc") {
    Domain a = star_shaped_domain(RadiusProfile::fourier({1.0}));
    Domain b = unit_disc();
    for (double s = 0.0; s < 6.2; s += 0.37) {
      CHECK(norm(a.boundary().point(s) - b.boundary().point(s)) < 1e-10);
      CHECK(norm(a.boundary().inward_conormal(s) - b.boundary().inward_conormal(s)) < 1e-10);
    }
  }

  TEST_CASE("star domain: length against a fine trapezoid rule, closure, conormal") {
    Domain d = star_shaped_domain(RadiusProfile::fourier({1.0, 0.0, 0.0, 0.1, 0.0}));
    auto r = [](double a) { return 1.0 + 0.1 * std::cos(2 * a); };
    auto dr = [](double a) { return -0.2 * std::sin(2 * a); };
    double L = oracle::polar_length(r, dr, 20000);
    const BoundaryCurve& c = d.boundary();
    CHECK(std::abs(c.total_length() - L) < 1e-8);

    auto gen = oracle::rng(3);
    std::uniform_real_distribution<double> u(0.0, L);
    for (int k = 0; k < 100; ++k) {
      double s = u(gen);
      CHECK(norm(c.point(s + L) - c.point(s)) < 1e-12);
      Vec2 t = c.tangent(s), nu = c.inward_conormal(s);
      CHECK(std::abs(dot(t, nu)) < 1e-12);
      CHECK(std::abs(norm(nu) - 1.0) < 1e-12);
      CHECK(d.inside(c.point(s) + 1e-4 * nu));
      CHECK(!d.inside(c.point(s) - 1e-4 * nu));
      // The point lies on r(alpha).
      Vec2 p = c.point(s);
      CHECK(std::abs(norm(p) - r(std::atan2(p.y, p.x))) < 1e-12);
    }
  }

  TEST_CASE("arc length and angle maps invert each other") {
    Domain d = star_shaped_domain(RadiusProfile::fourier({1.0, 0.05, 0.0, 0.1, 0.03}));
    for (double a = 0.05; a < 6.2; a += 0.41) {
      double s = d.boundary().arc_length_of_angle(a);
      CHECK(d.boundary().angle_of_arc_length(s) == doctest::Approx(a).epsilon(1e-11));
      CHECK(d.boundary().locate(d.boundary().point(s)) == doctest::Approx(s).epsilon(1e-10));
    }
  }

  TEST_CASE("signed boundary function and area") {
    Domain d = unit_disc();
    CHECK(d.signed_boundary_function({0.5, 0.0}) == doctest::Approx(-0.5));
    CHECK(d.signed_boundary_function({0.0, 1.0}) == doctest::Approx(0.0));
    CHECK(d.interior_depth({0.3, 0.4}) == doctest::Approx(0.5));
    CHECK(d.area() == doctest::Approx(oracle::pi).epsilon(1e-12));
    CHECK(d.diameter() == doctest::Approx(2.0));

    Domain e = star_shaped_domain(RadiusProfile::fourier({1.0, 0.0, 0.0, 0.1, 0.0}));
    // area = (1/2) int r^2 = pi (1 + 0.01/2)
    CHECK(e.area() == doctest::Approx(oracle::pi * 1.005).epsilon(1e-10));
  }

  TEST_CASE("angular frame is positively oriented") {
    for (double phi = -3.0; phi < 3.0; phi += 0.5) {
      CHECK(AngularFrame::orientation(phi) == doctest::Approx(1.0));
      CHECK(std::abs(dot(AngularFrame::theta_hat(phi), AngularFrame::eta_hat(phi))) < 1e-15);
    }
  }

  TEST_CASE("wrap helpers") {
    CHECK(wrap_angle(-0.5) == doctest::Approx(2 * oracle::pi - 0.5));
    CHECK(wrap_angle(7.0) == doctest::Approx(7.0 - 2 * oracle::pi));
    CHECK(wrap_signed(3.5) == doctest::Approx(3.5 - 2 * oracle::pi));
  }
}
