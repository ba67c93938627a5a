#include <doctest.h>

#include "oracles.hpp"
#include "rigidity/errors.hpp"
#include "rigidity/rigidity_suite.hpp"

using namespace rigidity;

namespace {

RefractionField one(const Domain& d) { return make_medium(constant_spec(1.0), d); }
ScalarField test_f(const Domain& d) { return gaussian_bumps({{1.0, {0.3, 0.1}, 0.25}}, &d); }

}  // namespace

TEST_SUITE("rigidity_suite") {
  TEST_CASE("phi-derivative identity: trivial cases of the printed form") {
    // Both sides agree up to extended-precision rounding.
    CHECK(lemma_phi_identity_residual(0.4, 0.4, 3.0, -2.0) < 1e-15);
    CHECK(lemma_phi_identity_residual(0.4, -0.9, 0.0, 0.0) == 0.0);
    // Counterexample to the printed sign.
    CHECK(lemma_phi_identity_residual(0.5, 0.0, 1.0, 0.0) > 0.5);
  }

  TEST_CASE("phi-derivative identity with sin(w1 - w2) holds") {
    auto gen = oracle::rng(21);
    std::uniform_real_distribution<double> w(-1.4, 1.4), dv(-10.0, 10.0);
    for (int k = 0; k < 10000; ++k) {
      double w1 = w(gen), w2 = w(gen), d1 = dv(gen), d2 = dv(gen);
      double scale = 1.0 + std::abs(d1) / std::pow(std::cos(w1), 2) + std::abs(d2) / std::pow(std::cos(w2), 2);
      REQUIRE(lemma_phi_identity_residual_corrected(w1, w2, d1, d2) / scale < 1e-12);
    }
  }

  TEST_CASE("rnn bracket") {
    CHECK(rnn_bracket(1.3, 1.3, 0.2, 0.2) == doctest::Approx(0.0).epsilon(1e-14));
    double n1 = 1.1, n2 = 1.4, w = 0.6;
    CHECK(rnn_bracket(n1, n2, w, w) == doctest::Approx(std::pow(n2 - n1, 2) / std::pow(std::cos(w), 2)));
    auto gen = oracle::rng(22);
    std::uniform_real_distribution<double> wd(-1.4, 1.4), nd(0.5, 2.0);
    for (int k = 0; k < 10000; ++k) {
      double a = nd(gen), b = nd(gen), w1 = wd(gen), w2 = wd(gen);
      double lower = std::pow(b / std::cos(w2) - a / std::cos(w1), 2);
      REQUIRE(rnn_bracket(a, b, w1, w2) >= lower - 1e-12 * (1.0 + lower));
    }
  }

  TEST_CASE("sphere bundle grid") {
    Domain d = unit_disc();
    SphereBundleGrid g = make_sphere_bundle_grid(d, 16, 8, 0.02);
    CHECK(g.nodes.size() == 256);
    CHECK(g.cells() == 256 * 8);
    CHECK(g.covered_area + g.collar_area == doctest::Approx(d.area()).epsilon(1e-14));
    CHECK(g.covered_area == doctest::Approx(oracle::pi * std::pow(1.0 - 0.04, 2)).epsilon(1e-12));
    for (Vec2 x : g.nodes) CHECK(d.interior_depth(x) >= 0.04 - 1e-12);

    Domain e = star_shaped_domain(RadiusProfile::fourier({1.0, 0.0, 0.0, 0.1, 0.0}));
    SphereBundleGrid h = make_sphere_bundle_grid(e, 24, 8, 0.0);
    CHECK(h.covered_area == doctest::Approx(e.area()).epsilon(1e-8));
  }

  TEST_CASE("Stokes integral of a trigonometric table") {
    Domain d = unit_disc();
    BoundaryGrid g = BoundaryGrid::make(d, 64, 64);
    std::vector<double> v(g.size());
    for (int i = 0; i < 64; ++i)
      for (int j = 0; j < 64; ++j) v[g.index(i, j)] = std::sin(g.s(i) + g.phi(j));
    // -int int cos^2(s + phi) ds dphi = -2 pi^2. Each 4th-order difference of a unit-frequency
    // sine is short by h^4/30, so the product is off by about 2 h^4/30 relative.
    StokesIntegral s = stokes_integral(g, v);
    const double exact = -2 * oracle::pi * oracle::pi, h = g.ds();
    CHECK(s.value == doctest::Approx(exact).epsilon(1e-5));
    CHECK(std::abs(s.value - exact) == doctest::Approx(2 * std::pow(h, 4) / 30 * std::abs(exact)).epsilon(0.05));
    // The Richardson estimate tracks the actual error.
    CHECK(s.richardson_error == doctest::Approx(std::abs(s.value - exact)).epsilon(0.1));

    std::vector<double> zero(g.size(), 0.0);
    CHECK(stokes_integral(g, zero).value == 0.0);
    BoundaryGrid odd = BoundaryGrid::make(d, 63, 64);
    CHECK_THROWS_AS(stokes_integral(odd, std::vector<double>(odd.size())), NumericalError);
  }

  TEST_CASE("coarse tables are rejected") {
    Domain d = unit_disc();
    BoundaryGrid g = BoundaryGrid::make(d, 8, 8);
    RhoTable r{g, std::vector<double>(g.size()), {}, {}};
    // Mode (3,1) aliases onto (-1,1) on the stride-2 grid, flipping the sign of the estimate.
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j)
        r.rho[g.index(i, j)] = std::sin(2 * oracle::pi * (3 * i + j) / 8.0) - 0.5 * std::sin(2 * oracle::pi * (i - j) / 8.0);
    try {
      inequality_rhs(r);
      FAIL("expected GridTooCoarse");
    } catch (const NumericalError& e) {
      CHECK(e.kind() == ErrorKind::GridTooCoarse);
    }
  }

  TEST_CASE("identical media give zero on both sides") {
    Domain d = unit_disc();
    RefractionField n = make_medium(bumps_spec(1.0, {{0.1, {0.3, 0.0}, 0.25}}, true), d);
    SphereBundleGrid g = make_sphere_bundle_grid(d, 6, 8);
    LhsResult l = inequality_lhs(n, n, d, g);
    CHECK(l.value == 0.0);
    HodographTable t = build_hodograph(n, d, 16, 16);
    CHECK(inequality_rhs(build_rho(t, t)) == 0.0);
  }

  TEST_CASE("X-ray transform") {
    Domain d = unit_disc();
    CHECK(xray_transform(ScalarField(), one(d), d, 0.0, oracle::pi) == 0.0);
    CHECK(xray_transform(ScalarField::radial_polynomial({1.0, -1.0}), one(d), d, 0.0, oracle::pi) ==
          doctest::Approx(4.0 / 3.0).epsilon(1e-10));
    // Off-centre chord at distance p: int (1 - p^2 - t^2) dt over |t| < sqrt(1-p^2) = (4/3)(1-p^2)^(3/2).
    double s = 0.0, phi = oracle::pi + 0.4, p = std::sin(0.4);
    CHECK(xray_transform(ScalarField::radial_polynomial({1.0, -1.0}), one(d), d, s, phi) ==
          doctest::Approx(4.0 / 3.0 * std::pow(1 - p * p, 1.5)).epsilon(1e-10));
  }

  TEST_CASE("linearization: endpoint-pinned travel times approach the X-ray transform") {
    Domain d = unit_disc();
    ScalarField f = test_f(d);
    LinearizationCheck a = linearization_check(f, one(d), d, 1e-2, 8, 8);
    LinearizationCheck b = linearization_check(f, one(d), d, 1e-3, 8, 8);
    CHECK(a.two_point_error < 5e-2);
    CHECK(b.two_point_error < 5e-3);
    CHECK(b.two_point_error < 0.2 * a.two_point_error);
    // At fixed launch direction the exit point moves at first order.
    CHECK(b.direction_pinned_error > 10 * b.two_point_error);
  }

  TEST_CASE("(fg) with f = 0") {
    Domain d = unit_disc();
    SphereBundleGrid g = make_sphere_bundle_grid(d, 8, 8);
    CHECK(fg_lhs(ScalarField(), one(d), d, g) == 0.0);
    XrayTable x = build_xray_table(ScalarField(), one(d), d, BoundaryGrid::make(d, 16, 16));
    CHECK(stokes_integral(x.grid, x.g).value == 0.0);
  }

  TEST_CASE("(fg) lhs on the homogeneous disc against the straight-line weight") {
    Domain d = unit_disc();
    ScalarField f = test_f(d);
    SphereBundleGrid g = make_sphere_bundle_grid(d, 24, 64, 0.02);
    double lhs = fg_lhs(f, one(d), d, g);
    double ref = 0.0;
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
      double v = f.value(g.nodes[k]);
      ref += g.weights[k] * v * v * disc_weight_straight_line(norm(g.nodes[k]));
    }
    CHECK(lhs == doctest::Approx(ref).epsilon(1e-2));
  }

  TEST_CASE("disc weights") {
    CHECK(disc_weight_closed_form(0.0) == doctest::Approx(2 * oracle::pi));
    CHECK(disc_weight_closed_form(0.5) == doctest::Approx(2 * oracle::pi * std::sqrt(3.0)).epsilon(1e-12));
    CHECK(disc_weight_closed_form(0.75) == doctest::Approx(2 * oracle::pi * std::sqrt(7.0)).epsilon(1e-12));
    CHECK_THROWS_AS(disc_weight_closed_form(1.0), NumericalError);
    CHECK_THROWS_AS(disc_weight_closed_form(-0.1), NumericalError);

    CHECK(std::abs(disc_weight_quadrature(0.0, 64) - 2 * oracle::pi) < 1e-10);
    // Independent oracle: Simpson on 1 / (1 - r^2 sin^2 phi).
    for (double r : {0.25, 0.5, 0.75}) {
      double ref = oracle::simpson([&](double p) { return 1.0 / (1.0 - r * r * std::sin(p) * std::sin(p)); }, 0.0,
                                   2 * oracle::pi, 20000);
      CHECK(disc_weight_quadrature(r, 4096) == doctest::Approx(ref).epsilon(1e-10));
      CHECK(disc_weight_straight_line(r) == doctest::Approx(ref).epsilon(1e-10));
    }
  }

  TEST_CASE("fan-beam chart") {
    FanBeam fb = fanbeam_map(0.0, 0.0);
    CHECK(fb.p == 0.0);
    auto gen = oracle::rng(31);
    std::uniform_real_distribution<double> s(0.0, 2 * oracle::pi), t(0.05, oracle::pi - 0.05);
    Domain d = unit_disc();
    for (int k = 0; k < 100; ++k) {
      double s1 = s(gen), phi = wrap_angle(s1 + oracle::pi / 2 + t(gen));
      FanBeam m = fanbeam_map(s1, phi);
      auto [s2, phi2] = fanbeam_inverse(m.p, m.vphi);
      CHECK(std::abs(wrap_signed(s2 - s1)) < 1e-10);
      CHECK(std::abs(wrap_signed(phi2 - phi)) < 1e-10);
      // The chord is the line <x, (cos vphi, sin vphi)> = p.
      Vec2 y = d.boundary().point(s1);
      CHECK(dot(y, unit_from_angle(m.vphi)) == doctest::Approx(m.p).epsilon(1e-12));
    }
    CHECK_THROWS_AS(fanbeam_inverse(1.0, 0.0), NumericalError);
  }

  TEST_CASE("fan-beam chain rule and parallel-beam data") {
    Domain d = unit_disc();
    ScalarField f = ScalarField::radial_polynomial({1.0, -1.0});
    ParallelBeam G = straight_parallel_beam(f, 64);
    CHECK(G(0.3, 1.0) == doctest::Approx(4.0 / 3.0 * std::pow(1 - 0.09, 1.5)).epsilon(1e-12));
    CHECK(G(1.2, 0.0) == 0.0);
    ChainRuleResidual c = chain_rule_residual(straight_parallel_beam(test_f(d), 96), 32, 32);
    CHECK(c.max_s < 1e-5);
    CHECK(c.max_phi < 1e-5);
    CHECK(c.cells > 0);
  }

  TEST_CASE("uniqueness demo on identical media") {
    Domain d = unit_disc();
    UniquenessReport u = uniqueness_demo(one(d), one(d), d, 16, 16);
    CHECK(u.hodograph_sup_distance == 0.0);
    CHECK(u.fields_distance == 0.0);
    CHECK(u.noise_floor < 1e-8);
  }

  TEST_CASE("L2 norm") {
    Domain d = unit_disc();
    // int (1 - r^2)^2 over the disc = pi / 3
    CHECK(l2_norm(ScalarField::radial_polynomial({1.0, -1.0}), d) == doctest::Approx(std::sqrt(oracle::pi / 3)).epsilon(1e-12));
  }
}
