#include <doctest.h>

#include "oracles.hpp"
#include "rigidity/errors.hpp"
#include "rigidity/tracer.hpp"

using namespace rigidity;

namespace {

RefractionField bump(const Domain& d) { return make_medium(bumps_spec(1.0, {{0.1, {0.3, 0.0}, 0.25}}, true), d); }

TracerOptions tight() {
  TracerOptions o;
  o.rtol = 1e-12;
  o.atol = 1e-14;
  return o;
}

}  // namespace

TEST_SUITE("tracer") {
  TEST_CASE("ray equations") {
    Domain d = unit_disc();
    RefractionField one = make_medium(constant_spec(1.0), d);
    RayDerivative r = ray_rhs({{0.2, 0.1}, 0.7, 0.0, 0.0}, one);
    CHECK(r.dphi == 0.0);
    CHECK(r.dtau == 1.0);
    CHECK(r.dx.x == doctest::Approx(std::cos(0.7)));

    RefractionField rad = make_medium(radial_spec({1.0, 0.2}), d);
    r = ray_rhs({{0.5, 0.0}, oracle::pi / 2, 0.0, 0.0}, rad);
    CHECK(r.dphi == doctest::Approx(-0.2 / 1.05).epsilon(1e-13));
    CHECK(r.dtau == doctest::Approx(1.05));
    // Moving along the gradient does not bend.
    r = ray_rhs({{0.5, 0.0}, 0.0, 0.0, 0.0}, rad);
    CHECK(std::abs(r.dphi) < 1e-16);
  }

  TEST_CASE("backward traces in the homogeneous disc") {
    Domain d = unit_disc();
    RefractionField one = make_medium(constant_spec(1.0), d);
    GeodesicPath p = trace_backward({0.0, 0.0}, 0.0, one, d);
    CHECK(p.entry_point().x == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(std::abs(p.entry_point().y) < 1e-10);
    CHECK(p.travel_time() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(p.status == PathStatus::interior_terminal);

    p = trace_backward({0.5, 0.0}, oracle::pi / 2, one, d);
    CHECK(p.entry_point().x == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(p.entry_point().y == doctest::Approx(-std::sqrt(0.75)).epsilon(1e-10));
    CHECK(p.travel_time() == doctest::Approx(std::sqrt(0.75)).epsilon(1e-10));
    CHECK(p.entry_cosine == doctest::Approx(std::sqrt(0.75)).epsilon(1e-9));

    auto gen = oracle::rng(1);
    std::uniform_real_distribution<double> u(-0.7, 0.7), a(0.0, 2 * oracle::pi);
    for (int k = 0; k < 50; ++k) {
      Vec2 x{u(gen), u(gen)};
      double phi = a(gen);
      GeodesicPath q = trace_backward(x, phi, one, d);
      CHECK(q.travel_time() == doctest::Approx(oracle::disc_backward_distance(x, phi)).epsilon(1e-10));
      CHECK(std::abs(d.signed_boundary_function(q.entry_point())) < 1e-10);
      CHECK(q.nodes.front().tau == 0.0);
      CHECK(norm(q.terminal_point() - x) < 1e-12);
    }
  }

  TEST_CASE("chords of the unit circle") {
    Domain d = unit_disc();
    RefractionField one = make_medium(constant_spec(1.0), d);
    GeodesicPath p = trace_chord(oracle::pi, 0.0, one, d);
    CHECK(p.travel_time() == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(std::abs(wrap_signed(p.exit_s)) < 1e-9);
    CHECK(p.status == PathStatus::boundary_to_boundary);
    CHECK(p.exit_cosine == doctest::Approx(-1.0).epsilon(1e-9));

    auto gen = oracle::rng(2);
    std::uniform_real_distribution<double> s(0.0, 2 * oracle::pi), t(0.1, oracle::pi - 0.1);
    for (int k = 0; k < 100; ++k) {
      double s1 = s(gen);
      // Incoming: phi within pi/2 of the inward normal direction s + pi.
      double phi = s1 + oracle::pi / 2 + t(gen);
      GeodesicPath c = trace_chord(s1, phi, one, d);
      double delta = std::abs(wrap_signed(c.exit_s - s1));
      CHECK(c.travel_time() == doctest::Approx(2.0 * std::sin(delta / 2)).epsilon(1e-9));
      CHECK(c.travel_time() == doctest::Approx(oracle::disc_chord_length(s1, phi)).epsilon(1e-9));
    }
  }

  TEST_CASE("bump medium: tolerance self-convergence and an independent RK4 integration") {
    Domain d = unit_disc();
    RefractionField n = bump(d);
    TracerOptions o;
    double a = trace_backward({0.0, 0.0}, 0.0, n, d, o).travel_time();
    TracerOptions ref = o;
    ref.rtol *= 0.1;
    ref.atol *= 0.1;
    double b = trace_backward({0.0, 0.0}, 0.0, n, d, ref).travel_time();
    CHECK(std::abs(a - b) < 1e-8);

    // Forward trace from the origin, checked against RK4 over the same arc length.
    GeodesicPath f = trace_forward({0.0, 0.0}, 0.4, n, d, tight());
    double rk = oracle::rk4_travel_time([&](Vec2 x) { return n.n(x); }, [&](Vec2 x) { return n.grad_n(x); },
                                        {0.0, 0.0}, 0.4, f.length(), 4000);
    CHECK(f.travel_time() == doctest::Approx(rk).epsilon(1e-10));
  }

  TEST_CASE("recorded nodes integrate to the travel time") {
    Domain d = unit_disc();
    RefractionField n = bump(d);
    TracerOptions o = tight();
    o.node_spacing = 0.002;
    GeodesicPath p = trace_chord(2.5, 2.5 + oracle::pi + 0.3, n, d, o);
    double trap = 0.0;
    for (std::size_t k = 1; k < p.nodes.size(); ++k) {
      double ds = p.nodes[k].sigma - p.nodes[k - 1].sigma;
      trap += 0.5 * ds * (n.n(p.nodes[k].x) + n.n(p.nodes[k - 1].x));
    }
    CHECK(trap == doctest::Approx(p.travel_time()).epsilon(1e-7));
    CHECK(std::abs(d.signed_boundary_function(p.entry_point())) < 1e-10);
    CHECK(std::abs(d.signed_boundary_function(p.terminal_point())) < 1e-10);
  }

  TEST_CASE("time reversal") {
    Domain d = unit_disc();
    RefractionField n = bump(d);
    auto gen = oracle::rng(4);
    std::uniform_real_distribution<double> s(0.0, 2 * oracle::pi), t(0.3, oracle::pi - 0.3);
    for (int k = 0; k < 20; ++k) {
      double s1 = s(gen), phi = s1 + oracle::pi / 2 + t(gen);
      GeodesicPath c = trace_chord(s1, phi, n, d, tight());
      GeodesicPath r = trace_chord(c.exit_s, c.exit_phi + oracle::pi, n, d, tight());
      CHECK(r.travel_time() == doctest::Approx(c.travel_time()).epsilon(1e-8));
      CHECK(std::abs(wrap_signed(r.exit_s - s1)) < 1e-8);
      // trace_backward from the exit point sees the same ray.
      Vec2 inner = c.nodes[c.nodes.size() / 2].x;
      GeodesicPath b = trace_backward(inner, c.nodes[c.nodes.size() / 2].phi, n, d, tight());
      CHECK(b.travel_time() == doctest::Approx(c.nodes[c.nodes.size() / 2].tau).epsilon(1e-8));
    }
  }

  TEST_CASE("conformal scaling") {
    Domain d = unit_disc();
    RefractionField n = bump(d);
    for (double lambda : {0.5, 2.0, 7.0}) {
      GeodesicPath a = trace_chord(1.0, 1.0 + oracle::pi + 0.2, n, d);
      GeodesicPath b = trace_chord(1.0, 1.0 + oracle::pi + 0.2, n.scaled(lambda), d);
      CHECK(b.travel_time() == doctest::Approx(lambda * a.travel_time()).epsilon(1e-10));
      CHECK(b.exit_s == doctest::Approx(a.exit_s).epsilon(1e-10));
    }
  }

  TEST_CASE("fixed steps converge at fourth order or better") {
    Domain d = unit_disc();
    RefractionField n = bump(d);
    auto time = [&](double h) {
      TracerOptions o;
      o.fixed_step = h;
      return trace_backward({0.2, 0.1}, 0.9, n, d, o).travel_time();
    };
    double t1 = time(0.1), t2 = time(0.05), t3 = time(0.025);
    double order = std::log2(std::abs(t1 - t2) / std::abs(t2 - t3));
    CHECK(order >= 4.0);
  }

  TEST_CASE("line integrals ride along") {
    Domain d = unit_disc();
    RefractionField one = make_medium(constant_spec(1.0), d);
    ScalarField f = ScalarField::radial_polynomial({1.0, -1.0});
    const ScalarField fs[1] = {f};
    GeodesicPath p = trace_chord(oracle::pi, 0.0, one, d, {}, fs);
    CHECK(p.line_integrals[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
  }

  TEST_CASE("trapping and tangent exits are reported") {
    Domain d = unit_disc();
    RefractionField lens = make_medium(bumps_spec(1.0, {{3.0, {0, 0}, 0.3}}, false), d);
    // Circular orbit radius where d(r n)/dr = 0; a ray tangent to it near there circulates.
    bool trapped = false;
    for (double r = 0.15; r < 0.45 && !trapped; r += 0.01) {
      try {
        trace_backward({r, 0.0}, oracle::pi / 2, lens, d);
      } catch (const NumericalError& e) {
        trapped = e.kind() == ErrorKind::Trapped || e.kind() == ErrorKind::TangentExit;
      }
    }
    CHECK(trapped);
  }
}
