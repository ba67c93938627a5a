#include "rigidity/hodograph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rigidity/errors.hpp"
#include "rigidity/quadrature.hpp"

namespace rigidity {

namespace {

constexpr double kOnBoundary = 1e-12;

std::string cell_name(int i, int j, double s, double phi) {
  return "cell (" + std::to_string(i) + "," + std::to_string(j) + ") s=" + std::to_string(s) +
         " phi=" + std::to_string(phi);
}

double periodic_offset(double d, double period) {
  d = std::fmod(d, period);
  if (d > 0.5 * period) d -= period;
  if (d <= -0.5 * period) d += period;
  return d;
}

}  // namespace

double tau_at(Vec2 x, double phi, const RefractionField& field, const Domain& domain, const TracerOptions& opts) {
  double g = domain.signed_boundary_function(x);
  if (std::abs(g) <= kOnBoundary) {
    double s = domain.boundary().locate(x);
    if (domain.classify_direction(s, phi) != DirectionClass::incoming) return 0.0;
    return trace_forward(x, phi, field, domain, opts).travel_time();
  }
  if (g > 0.0) throw NumericalError(ErrorKind::InvalidArgument, "tau_at: point outside the domain");
  return trace_backward(x, phi, field, domain, opts).travel_time();
}

GradientOptions GradientOptions::bulk() {
  GradientOptions o;
  o.h_factor = 1e-4;
  o.richardson = false;
  o.tracer.rtol = 1e-10;
  o.tracer.atol = 1e-13;
  return o;
}

double GradientSample::identity_residual() const {
  return dot(dtau, unit_from_angle(phi)) / n_at_x - 1.0;
}

double GradientSample::flow_residual() const {
  return (dot(dtau, unit_from_angle(phi)) + kappa * dphi_tau) / n_at_x - 1.0;
}

GradientSample grad_x_tau(Vec2 x, double phi, const RefractionField& field, const Domain& domain,
                          const GradientOptions& opts) {
  const double h = opts.h_factor * domain.diameter();
  if (domain.interior_depth(x) <= 2.0 * h)
    throw NumericalError(ErrorKind::InvalidArgument, "grad_x_tau: point within 2h of the boundary");
  auto central = [&](double hh) {
    double tx = (tau_at(x + Vec2{hh, 0.0}, phi, field, domain, opts.tracer) -
                 tau_at(x - Vec2{hh, 0.0}, phi, field, domain, opts.tracer)) /
                (2.0 * hh);
    double ty = (tau_at(x + Vec2{0.0, hh}, phi, field, domain, opts.tracer) -
                 tau_at(x - Vec2{0.0, hh}, phi, field, domain, opts.tracer)) /
                (2.0 * hh);
    return Vec2{tx, ty};
  };
  const double ha = opts.h_factor;
  auto central_phi = [&](double hh) {
    return (tau_at(x, phi + hh, field, domain, opts.tracer) - tau_at(x, phi - hh, field, domain, opts.tracer)) /
           (2.0 * hh);
  };
  Vec2 d = central(h);
  double dp = central_phi(ha);
  if (opts.richardson) {
    d = (4.0 * central(0.5 * h) - d) / 3.0;
    dp = (4.0 * central_phi(0.5 * ha) - dp) / 3.0;
  }

  GradientSample g;
  g.x = x;
  g.phi = phi;
  g.dtau = d;
  g.e = normalized(d);
  g.omega = std::atan2(dot(d, AngularFrame::eta_hat(phi)), dot(d, AngularFrame::theta_hat(phi)));
  g.n_at_x = field.n(x);
  g.dphi_tau = dp;
  g.kappa = ray_rhs(RayState{x, phi, 0.0, 0.0}, field).dphi;
  double res = g.flow_residual();
  if (!(std::abs(res) <= opts.identity_tol))
    throw NumericalError(ErrorKind::IdentityViolation,
                         "<d_x tau|theta> + kappa d_phi tau = n(x) missed by " + std::to_string(res) + " at x=(" + std::to_string(x.x) +
                             "," + std::to_string(x.y) + ") phi=" + std::to_string(phi));
  return g;
}

BoundaryGrid BoundaryGrid::make(const Domain& domain, int n_s, int n_phi, double margin) {
  if (n_s < 8 || n_phi < 8) throw NumericalError(ErrorKind::InvalidArgument, "boundary grid needs at least 8x8 cells");
  BoundaryGrid g;
  g.n_s = n_s;
  g.n_phi = n_phi;
  g.total_length = domain.boundary().total_length();
  g.margin = margin;
  g.mask.assign(g.size(), 0);
  for (int i = 0; i < n_s; ++i)
    for (int j = 0; j < n_phi; ++j) g.mask[g.index(i, j)] = domain.conormal_cosine(g.s(i), g.phi(j)) > margin;
  return g;
}

int BoundaryGrid::included_count() const { return int(std::count(mask.begin(), mask.end(), std::uint8_t{1})); }

bool BoundaryGrid::same_as(const BoundaryGrid& o) const {
  return n_s == o.n_s && n_phi == o.n_phi && total_length == o.total_length && margin == o.margin && mask == o.mask;
}

HodographTable build_hodograph(const RefractionField& field, const Domain& domain, int n_s, int n_phi, Execution exec,
                               const TracerOptions& opts) {
  return build_hodograph(field, domain, BoundaryGrid::make(domain, n_s, n_phi), exec, opts);
}

HodographTable build_hodograph(const RefractionField& field, const Domain& domain, const BoundaryGrid& grid,
                               Execution exec, const TracerOptions& opts) {
  HodographTable t;
  t.grid = grid;
  t.tau.assign(grid.size(), 0.0);
  t.exit_s.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
  t.exit_phi.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
  TracerOptions o = opts;
  o.record_nodes = false;
  parallel_for(exec, grid.size(), [&](std::size_t k) {
    if (!grid.mask[k]) return;
    int i = int(k / grid.n_phi), j = int(k % grid.n_phi);
    try {
      GeodesicPath p = trace_chord(grid.s(i), grid.phi(j), field, domain, o);
      t.tau[k] = p.travel_time();
      t.exit_s[k] = p.exit_s;
      t.exit_phi[k] = p.exit_phi;
    } catch (const NumericalError& e) {
      throw NumericalError(e.kind(), cell_name(i, j, grid.s(i), grid.phi(j)) + ": " + e.what());
    }
  });
  return t;
}

GridDerivatives periodic_derivatives(const BoundaryGrid& grid, const std::vector<double>& v, int stride) {
  const int ns = grid.n_s, np = grid.n_phi;
  const double hs = grid.ds() * stride, hp = grid.dphi() * stride;
  auto at = [&](int i, int j) { return v[grid.index(((i % ns) + ns) % ns, ((j % np) + np) % np)]; };
  GridDerivatives d;
  d.d_s.assign(grid.size(), 0.0);
  d.d_phi.assign(grid.size(), 0.0);
  const int a = stride, b = 2 * stride;
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < np; ++j) {
      std::size_t k = grid.index(i, j);
      d.d_s[k] = (-at(i + b, j) + 8.0 * at(i + a, j) - 8.0 * at(i - a, j) + at(i - b, j)) / (12.0 * hs);
      d.d_phi[k] = (-at(i, j + b) + 8.0 * at(i, j + a) - 8.0 * at(i, j - a) + at(i, j - b)) / (12.0 * hp);
    }
  return d;
}

RhoTable build_rho(const HodographTable& t1, const HodographTable& t2) {
  if (!t1.grid.same_as(t2.grid)) throw NumericalError(ErrorKind::GridMismatch, "hodograph tables are on different grids");
  RhoTable r;
  r.grid = t1.grid;
  r.rho.resize(t1.tau.size());
  for (std::size_t k = 0; k < r.rho.size(); ++k) r.rho[k] = t2.tau[k] - t1.tau[k];
  auto d = periodic_derivatives(r.grid, r.rho);
  r.d_s_rho = std::move(d.d_s);
  r.d_phi_rho = std::move(d.d_phi);
  return r;
}

double straight_chord_angle(const Domain& domain, double s_entry, double s_exit) {
  const auto& b = domain.boundary();
  return angle_of(b.point(s_exit) - b.point(s_entry));
}

GeodesicPath shoot_two_point(double s_entry, double s_exit, double phi_guess, const RefractionField& field,
                             const Domain& domain, const TracerOptions& opts, std::span<const ScalarField> integrands) {
  const double L = domain.boundary().total_length();
  const double tol = 1e-12 * L;
  constexpr double kMinCosine = 1e-3;
  auto miss = [&](const GeodesicPath& p) { return periodic_offset(p.exit_s - s_exit, L); };
  auto launch = [&](double phi) { return trace_chord(s_entry, phi, field, domain, opts, integrands); };
  auto usable = [&](double phi) { return domain.conormal_cosine(s_entry, phi) > kMinCosine; };

  if (!usable(phi_guess))
    throw NumericalError(ErrorKind::InvalidArgument, "shoot_two_point: initial launch angle is not incoming");
  double phi0 = phi_guess;
  GeodesicPath p0 = launch(phi0);
  double f0 = miss(p0);
  if (std::abs(f0) <= tol) return p0;
  double phi1 = phi0 + (f0 > 0 ? -1e-4 : 1e-4);
  if (!usable(phi1)) phi1 = phi0 - (phi1 - phi0);
  GeodesicPath p1 = launch(phi1);
  double f1 = miss(p1);
  for (int it = 0; it < 60; ++it) {
    if (std::abs(f1) <= tol) return p1;
    if (f1 == f0) break;
    double step = -f1 * (phi1 - phi0) / (f1 - f0);
    double phi2 = phi1 + step;
    int guard = 0;
    while (!usable(phi2) && guard++ < 40) {
      step *= 0.5;
      phi2 = phi1 + step;
    }
    GeodesicPath p2;
    try {
      p2 = launch(phi2);
    } catch (const NumericalError& e) {
      if (e.kind() != ErrorKind::TangentExit) throw;
      step *= 0.25;
      phi2 = phi1 + step;
      p2 = launch(phi2);
    }
    if (phi2 == phi1) return p2;
    phi0 = phi1;
    f0 = f1;
    phi1 = phi2;
    f1 = miss(p2);
    p1 = std::move(p2);
  }
  if (std::abs(f1) <= 1e3 * tol) return p1;
  throw NumericalError(ErrorKind::Diverged, "two-point shooting from s=" + std::to_string(s_entry) +
                                                " to s=" + std::to_string(s_exit) + " did not converge");
}

TwoPointTable build_two_point_table(const RefractionField& field, const Domain& domain, double s_y, double s_x,
                                    double ds, int half, double phi_guess, const TracerOptions& opts) {
  if (half < 1) throw NumericalError(ErrorKind::InvalidArgument, "two-point stencil needs half >= 1");
  TwoPointTable t;
  t.s_y = s_y;
  t.center = s_x;
  t.ds = ds;
  const int n = 2 * half + 1;
  t.s_x.resize(n);
  t.T.resize(n);
  t.launch_phi.resize(n);
  t.exit_phi.resize(n);
  TracerOptions o = opts;
  o.record_nodes = false;
  auto solve = [&](int m, double guess) {
    int k = m + half;
    t.s_x[k] = s_x + m * ds;
    GeodesicPath p = shoot_two_point(s_y, t.s_x[k], guess, field, domain, o);
    t.T[k] = p.travel_time();
    t.launch_phi[k] = p.nodes.front().phi;
    t.exit_phi[k] = p.exit_phi;
  };
  solve(0, std::isnan(phi_guess) ? straight_chord_angle(domain, s_y, s_x) : phi_guess);
  // Continue the branch outward from the center.
  for (int m = 1; m <= half; ++m) {
    solve(m, t.launch_phi[m - 1 + half]);
    solve(-m, t.launch_phi[-m + 1 + half]);
  }
  return t;
}

ExitAngle exit_angle_from_hodograph(const TwoPointTable& t, const RefractionField& field, const Domain& domain) {
  const int half = int(t.T.size() / 2);
  auto T = [&](int m) { return t.T[m + half]; };
  ExitAngle a;
  if (half >= 2)
    a.dT_ds = (-T(2) + 8.0 * T(1) - 8.0 * T(-1) + T(-2)) / (12.0 * t.ds);
  else
    a.dT_ds = (T(1) - T(-1)) / (2.0 * t.ds);
  const auto& b = domain.boundary();
  double n = field.n(b.point(t.center));
  double sp = a.dT_ds / n;
  if (std::abs(sp) > 1.0 + 1e-6)
    throw NumericalError(ErrorKind::OutOfRange, "|sin psi| = " + std::to_string(std::abs(sp)) + " exceeds 1");
  if (std::abs(sp) > 1.0) {
    sp = std::copysign(1.0, sp);
    a.clamped = true;
  }
  a.sin_psi = sp;
  a.psi = std::asin(sp);
  double beta = angle_of(b.inward_conormal(t.center));
  a.phi = wrap_angle(a.psi + beta + kPi);
  return a;
}

double jacobian_row(const GeodesicPath& path, const ScalarField& basis_k) {
  static const GaussRule rule = gauss_legendre(6);
  CompensatedSum acc;
  for (std::size_t k = 0; k + 1 < path.nodes.size(); ++k) {
    const RayState& a = path.nodes[k];
    const RayState& b = path.nodes[k + 1];
    double h = b.sigma - a.sigma;
    if (h <= 0.0) continue;
    Vec2 m0 = h * unit_from_angle(a.phi), m1 = h * unit_from_angle(b.phi);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      double t = 0.5 * (rule.nodes[q] + 1.0);
      double t2 = t * t, t3 = t2 * t;
      Vec2 x = (2 * t3 - 3 * t2 + 1) * a.x + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * b.x + (t3 - t2) * m1;
      acc.add(0.5 * h * rule.weights[q] * basis_k.value(x));
    }
  }
  return acc.value();
}

}  // namespace rigidity
