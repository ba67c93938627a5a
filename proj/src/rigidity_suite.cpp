#include "rigidity/rigidity_suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "rigidity/errors.hpp"
#include "rigidity/quadrature.hpp"

namespace rigidity {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

long double lemma_lhs(long double w1, long double w2, long double d1, long double d2, long double sin_term) {
  long double c1 = std::cos(w1), c2 = std::cos(w2), s1 = std::sin(w1), s2 = std::sin(w2);
  return std::cos(w1 - w2) * (d1 + d2) / (c1 * c2) + sin_term * (c2 * s1 * d1 - c1 * s2 * d2) / (c1 * c1 * c2 * c2);
}

long double lemma_rhs(long double w1, long double w2, long double d1, long double d2) {
  long double c1 = std::cos(w1), c2 = std::cos(w2);
  return d1 / (c1 * c1) + d2 / (c2 * c2);
}

}  // namespace

double lemma_phi_identity_residual(double w1, double w2, double d1, double d2) {
  long double a = w1, b = w2;
  return double(std::abs(lemma_lhs(a, b, d1, d2, std::sin(b - a)) - lemma_rhs(a, b, d1, d2)));
}

double lemma_phi_identity_residual_corrected(double w1, double w2, double d1, double d2) {
  long double a = w1, b = w2;
  return double(std::abs(lemma_lhs(a, b, d1, d2, std::sin(a - b)) - lemma_rhs(a, b, d1, d2)));
}

double rnn_bracket(double n1, double n2, double w1, double w2) {
  double a = n2 / std::cos(w2), b = n1 / std::cos(w1);
  return a * a + b * b - 2.0 * std::cos(w1 - w2) * a * b;
}

std::string GridSpec::str() const {
  return "(" + std::to_string(n_x) + "^2, " + std::to_string(n_phi) + ", " + std::to_string(n_s) + ")";
}

SphereBundleGrid make_sphere_bundle_grid(const Domain& domain, int n_x, int n_phi, double collar_factor) {
  if (n_x < 2 || n_phi < 1) throw NumericalError(ErrorKind::InvalidArgument, "sphere bundle grid too small");
  SphereBundleGrid g;
  g.n_r = g.n_alpha = n_x;
  g.n_phi = n_phi;
  g.collar = collar_factor * domain.diameter();
  const GaussRule rule = gauss_legendre(n_x);
  const double da = kTwoPi / n_x;
  CompensatedSum area;
  for (int a = 0; a < n_x; ++a) {
    double alpha = (a + 0.5) * da;
    double r = domain.radius(alpha);
    double dr = (domain.radius(alpha + 1e-6) - domain.radius(alpha - 1e-6)) / 2e-6;
    // Radius at which the normal depth equals the collar width.
    double R = r - g.collar * std::sqrt(r * r + dr * dr) / r;
    Vec2 u = unit_from_angle(alpha);
    for (int m = 0; m < n_x; ++m) {
      double t = 0.5 * R * (rule.nodes[m] + 1.0);
      double w = 0.5 * R * rule.weights[m] * t * da;
      g.nodes.push_back(t * u);
      g.weights.push_back(w);
      area.add(w);
    }
  }
  g.covered_area = area.value();
  g.collar_area = domain.area() - g.covered_area;
  return g;
}

LhsResult inequality_lhs(const RefractionField& field1, const RefractionField& field2, const Domain& domain,
                         const SphereBundleGrid& grid, Execution exec, const GradientOptions& opts) {
  const std::size_t cells = grid.cells();
  std::vector<double> lit(cells), gn(cells), idr(cells), flr(cells);
  parallel_for(exec, cells, [&](std::size_t c) {
    std::size_t k = c / grid.n_phi;
    int j = int(c % grid.n_phi);
    Vec2 x = grid.nodes[k];
    double phi = grid.phi(j);
    GradientSample a = grad_x_tau(x, phi, field1, domain, opts);
    GradientSample b = grad_x_tau(x, phi, field2, domain, opts);
    lit[c] = b.n_at_x / b.cos_omega() - a.n_at_x / a.cos_omega();
    gn[c] = norm(b.dtau) - norm(a.dtau);
    idr[c] = std::max(std::abs(a.identity_residual()), std::abs(b.identity_residual()));
    flr[c] = std::max(std::abs(a.flow_residual()), std::abs(b.flow_residual()));
  });
  CompensatedSum s1, s2;
  LhsResult r;
  for (std::size_t c = 0; c < cells; ++c) {
    double w = grid.weights[c / grid.n_phi] * grid.dphi();
    s1.add(w * lit[c] * lit[c]);
    s2.add(w * gn[c] * gn[c]);
    r.max_identity_residual = std::max(r.max_identity_residual, idr[c]);
    r.max_flow_residual = std::max(r.max_flow_residual, flr[c]);
  }
  r.value = s1.value();
  r.value_gradient_norm = s2.value();
  return r;
}

StokesIntegral stokes_integral(const BoundaryGrid& grid, const std::vector<double>& values) {
  if (grid.n_s % 2 || grid.n_phi % 2) throw NumericalError(ErrorKind::InvalidArgument, "boundary grid needs even sizes");
  auto fine = periodic_derivatives(grid, values, 1);
  auto coarse = periodic_derivatives(grid, values, 2);
  CompensatedSum f, c;
  for (int i = 0; i < grid.n_s; ++i)
    for (int j = 0; j < grid.n_phi; ++j) {
      std::size_t k = grid.index(i, j);
      f.add(fine.d_s[k] * fine.d_phi[k]);
      if (i % 2 == 0 && j % 2 == 0) c.add(coarse.d_s[k] * coarse.d_phi[k]);
    }
  StokesIntegral s;
  s.value = -f.value() * grid.ds() * grid.dphi();
  s.coarse_value = -c.value() * 4.0 * grid.ds() * grid.dphi();
  // 4th-order differences: the error of the fine value is about (fine - coarse) / (2^4 - 1).
  s.richardson_error = std::abs(s.value - s.coarse_value) / 15.0;
  return s;
}

namespace {

void check_resolution(const StokesIntegral& s, const char* what) {
  if (s.richardson_error > 0.1 * std::abs(s.value) + 1e-14)
    throw NumericalError(ErrorKind::GridTooCoarse, std::string(what) + ": Richardson error estimate " +
                                                       std::to_string(s.richardson_error) + " exceeds 10% of " +
                                                       std::to_string(s.value));
}

void finish_report(InequalityReport& r) {
  r.lhs = r.fine.lhs;
  r.rhs = r.fine.rhs;
  r.margin = r.fine.margin;
  r.drift = std::max(std::abs(r.fine.lhs - r.coarse.lhs), std::abs(r.fine.rhs - r.coarse.rhs));
  r.tol_grid = std::max(0.02 * std::abs(r.fine.rhs), r.drift);
  r.holds = r.coarse.lhs <= r.coarse.rhs + r.tol_grid && r.fine.lhs <= r.fine.rhs + r.tol_grid;
}

}  // namespace

double inequality_rhs(const RhoTable& rho) {
  StokesIntegral s = stokes_integral(rho.grid, rho.rho);
  check_resolution(s, "inequality rhs");
  return s.value;
}

std::string InequalityReport::summary() const {
  char buf[256];
  std::string out = label.empty() ? std::string() : label + "\n";
  out += "  grid                      lhs            rhs            margin\n";
  for (const InequalityLevel* l : {&coarse, &fine}) {
    std::snprintf(buf, sizeof buf, "  %-20s %14.6e %14.6e %14.6e\n", l->grid.str().c_str(), l->lhs, l->rhs, l->margin);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "  drift %.3e  tol_grid %.3e  collar %.3g (halved: lhs %.6e)  holds: %s\n", drift,
                tol_grid, collar, collar_halved_lhs, holds ? "yes" : "no");
  out += buf;
  return out;
}

InequalityReport verify_inequality(const RefractionField& field1, const RefractionField& field2, const Domain& domain,
                                   const GridSpec& coarse, const GridSpec& fine, const VerifyOptions& opts) {
  InequalityReport rep;
  rep.collar = opts.collar_factor * domain.diameter();
  auto level = [&](const GridSpec& spec) {
    InequalityLevel l;
    l.grid = spec;
    auto t0 = Clock::now();
    SphereBundleGrid g = make_sphere_bundle_grid(domain, spec.n_x, spec.n_phi, opts.collar_factor);
    l.covered_area = g.covered_area;
    l.collar_area = g.collar_area;
    LhsResult lhs = inequality_lhs(field1, field2, domain, g, opts.exec, opts.gradient);
    BoundaryGrid bg = BoundaryGrid::make(domain, spec.n_s, spec.n_phi);
    rep.tangency_margin = bg.margin;
    RhoTable rho = build_rho(build_hodograph(field1, domain, bg, opts.exec, opts.tracer),
                             build_hodograph(field2, domain, bg, opts.exec, opts.tracer));
    StokesIntegral s = stokes_integral(rho.grid, rho.rho);
    check_resolution(s, "inequality rhs");
    l.lhs = lhs.value;
    l.lhs_gradient_norm = lhs.value_gradient_norm;
    l.max_identity_residual = lhs.max_identity_residual;
    l.max_flow_residual = lhs.max_flow_residual;
    l.rhs = s.value;
    l.rhs_richardson_error = s.richardson_error;
    l.margin = l.rhs - l.lhs;
    l.seconds = seconds_since(t0);
    return l;
  };
  rep.coarse = level(coarse);
  rep.fine = level(fine);
  if (opts.collar_sensitivity) {
    SphereBundleGrid g = make_sphere_bundle_grid(domain, coarse.n_x, coarse.n_phi, 0.5 * opts.collar_factor);
    rep.collar_halved_lhs = inequality_lhs(field1, field2, domain, g, opts.exec, opts.gradient).value;
  }
  finish_report(rep);
  return rep;
}

double xray_transform(const ScalarField& f, const RefractionField& field, const Domain& domain, double s, double phi,
                      const TracerOptions& opts) {
  TracerOptions o = opts;
  o.record_nodes = false;
  const ScalarField fs[1] = {f};
  return trace_chord(s, phi, field, domain, o, fs).line_integrals[0];
}

XrayTable build_xray_table(const ScalarField& f, const RefractionField& field, const Domain& domain,
                           const BoundaryGrid& grid, Execution exec, const TracerOptions& opts) {
  XrayTable t;
  t.grid = grid;
  t.g.assign(grid.size(), 0.0);
  parallel_for(exec, grid.size(), [&](std::size_t k) {
    if (!grid.mask[k]) return;
    int i = int(k / grid.n_phi), j = int(k % grid.n_phi);
    t.g[k] = xray_transform(f, field, domain, grid.s(i), grid.phi(j), opts);
  });
  return t;
}

double fg_lhs(const ScalarField& f, const RefractionField& field, const Domain& domain, const SphereBundleGrid& grid,
              Execution exec, const GradientOptions& opts) {
  const std::size_t cells = grid.cells();
  std::vector<double> fk(grid.nodes.size());
  for (std::size_t k = 0; k < fk.size(); ++k) fk[k] = f.value(grid.nodes[k]);
  std::vector<double> inv_cos2(cells, 0.0);
  parallel_for(exec, cells, [&](std::size_t c) {
    std::size_t k = c / grid.n_phi;
    if (fk[k] == 0.0) return;
    GradientSample g = grad_x_tau(grid.nodes[k], grid.phi(int(c % grid.n_phi)), field, domain, opts);
    double co = g.cos_omega();
    inv_cos2[c] = 1.0 / (co * co);
  });
  CompensatedSum acc;
  for (std::size_t c = 0; c < cells; ++c) {
    std::size_t k = c / grid.n_phi;
    acc.add(grid.weights[k] * grid.dphi() * fk[k] * fk[k] * inv_cos2[c]);
  }
  return acc.value();
}

InequalityReport fg_inequality(const ScalarField& f, const RefractionField& field, const Domain& domain,
                               const GridSpec& coarse, const GridSpec& fine, const VerifyOptions& opts) {
  if (!vanishes_on_boundary(f, domain))
    throw NumericalError(ErrorKind::InvalidArgument, "(fg) needs f vanishing on the boundary");
  InequalityReport rep;
  rep.collar = opts.collar_factor * domain.diameter();
  auto level = [&](const GridSpec& spec) {
    InequalityLevel l;
    l.grid = spec;
    auto t0 = Clock::now();
    SphereBundleGrid g = make_sphere_bundle_grid(domain, spec.n_x, spec.n_phi, opts.collar_factor);
    l.covered_area = g.covered_area;
    l.collar_area = g.collar_area;
    l.lhs = fg_lhs(f, field, domain, g, opts.exec, opts.gradient);
    BoundaryGrid bg = BoundaryGrid::make(domain, spec.n_s, spec.n_phi);
    rep.tangency_margin = bg.margin;
    XrayTable x = build_xray_table(f, field, domain, bg, opts.exec, opts.tracer);
    StokesIntegral s = stokes_integral(x.grid, x.g);
    check_resolution(s, "(fg) rhs");
    l.rhs = s.value;
    l.rhs_richardson_error = s.richardson_error;
    l.margin = l.rhs - l.lhs;
    l.seconds = seconds_since(t0);
    return l;
  };
  rep.coarse = level(coarse);
  rep.fine = level(fine);
  if (opts.collar_sensitivity) {
    SphereBundleGrid g = make_sphere_bundle_grid(domain, coarse.n_x, coarse.n_phi, 0.5 * opts.collar_factor);
    rep.collar_halved_lhs = fg_lhs(f, field, domain, g, opts.exec, opts.gradient);
  }
  finish_report(rep);
  return rep;
}

LinearizationCheck linearization_check(const ScalarField& f, const RefractionField& field, const Domain& domain,
                                       double eps, int n_s, int n_phi, Execution exec) {
  BoundaryGrid grid = BoundaryGrid::make(domain, n_s, n_phi);
  RefractionField perturbed = field.perturbed(eps, f, domain);
  std::vector<std::size_t> cells;
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (grid.mask[k]) cells.push_back(k);
  std::vector<double> g(cells.size()), two(cells.size()), pinned(cells.size());
  TracerOptions o;
  o.rtol = 1e-11;
  o.atol = 1e-14;
  o.record_nodes = false;
  const ScalarField fs[1] = {f};
  parallel_for(exec, cells.size(), [&](std::size_t c) {
    int i = int(cells[c] / grid.n_phi), j = int(cells[c] % grid.n_phi);
    GeodesicPath p = trace_chord(grid.s(i), grid.phi(j), field, domain, o, fs);
    g[c] = p.line_integrals[0];
    pinned[c] = (trace_chord(grid.s(i), grid.phi(j), perturbed, domain, o).travel_time() - p.travel_time()) / eps;
    two[c] = (shoot_two_point(grid.s(i), p.exit_s, grid.phi(j), perturbed, domain, o).travel_time() - p.travel_time()) /
             eps;
  });
  LinearizationCheck r;
  r.eps = eps;
  r.chords = int(cells.size());
  double scale = 0.0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    scale = std::max(scale, std::abs(g[c]));
    r.two_point_error = std::max(r.two_point_error, std::abs(two[c] - g[c]));
    r.direction_pinned_error = std::max(r.direction_pinned_error, std::abs(pinned[c] - g[c]));
  }
  if (scale > 0.0) {
    r.two_point_error /= scale;
    r.direction_pinned_error /= scale;
  }
  return r;
}

double disc_weight_closed_form(double r) {
  if (!(r >= 0.0 && r < 1.0)) throw NumericalError(ErrorKind::OutOfRange, "disc weight needs 0 <= r < 1");
  return kTwoPi * std::sqrt((1.0 + r) / (1.0 - r));
}

double disc_weight_straight_line(double r) {
  if (!(r >= 0.0 && r < 1.0)) throw NumericalError(ErrorKind::OutOfRange, "disc weight needs 0 <= r < 1");
  return kTwoPi / std::sqrt(1.0 - r * r);
}

double disc_straight_cos_omega(Vec2 x, double phi) {
  double b = dot(x, unit_from_angle(phi));
  return std::sqrt(1.0 - dot(x, x) + b * b);
}

double disc_weight_quadrature(double r, int n_phi) {
  if (!(r >= 0.0 && r <= 0.9)) throw NumericalError(ErrorKind::OutOfRange, "disc weight quadrature needs 0 <= r <= 0.9");
  const double dphi = kTwoPi / n_phi;
  CompensatedSum acc;
  for (int j = 0; j < n_phi; ++j) {
    double c = disc_straight_cos_omega({r, 0.0}, j * dphi);
    acc.add(dphi / (c * c));
  }
  return acc.value();
}

FanBeam fanbeam_map(double s, double phi) { return {std::sin(s - phi), phi + 0.5 * kPi}; }

std::pair<double, double> fanbeam_inverse(double p, double vphi) {
  if (!(std::abs(p) < 1.0)) throw NumericalError(ErrorKind::OutOfRange, "fan-beam inverse needs |p| < 1");
  double phi = vphi - 0.5 * kPi;
  return {wrap_angle(phi + kPi - std::asin(p)), wrap_angle(phi)};
}

ParallelBeam straight_parallel_beam(const ScalarField& f, int n_quad) {
  auto rule = std::make_shared<GaussRule>(gauss_legendre(n_quad));
  return [f, rule](double p, double vphi) {
    if (std::abs(p) >= 1.0) return 0.0;
    double half = std::sqrt(1.0 - p * p);
    Vec2 nrm = unit_from_angle(vphi), dir{nrm.y, -nrm.x};
    CompensatedSum acc;
    for (std::size_t q = 0; q < rule->nodes.size(); ++q)
      acc.add(half * rule->weights[q] * f.value(p * nrm + half * rule->nodes[q] * dir));
    return acc.value();
  };
}

ChainRuleResidual chain_rule_residual(const ParallelBeam& G, int n_s, int n_phi, double p_max, double h) {
  ChainRuleResidual res;
  auto g = [&](double s, double phi) {
    FanBeam fb = fanbeam_map(s, phi);
    return G(fb.p, fb.vphi);
  };
  for (int i = 0; i < n_s; ++i)
    for (int j = 0; j < n_phi; ++j) {
      double s = kTwoPi * i / n_s, phi = kTwoPi * j / n_phi;
      if (-std::cos(s - phi) <= 0.0) continue;  // <nu|theta> on the unit circle
      FanBeam fb = fanbeam_map(s, phi);
      if (std::abs(fb.p) > p_max) continue;
      double gs = (g(s + h, phi) - g(s - h, phi)) / (2 * h);
      double gphi = (g(s, phi + h) - g(s, phi - h)) / (2 * h);
      double Gp = (G(fb.p + h, fb.vphi) - G(fb.p - h, fb.vphi)) / (2 * h);
      double Gv = (G(fb.p, fb.vphi + h) - G(fb.p, fb.vphi - h)) / (2 * h);
      double c = std::sqrt(1.0 - fb.p * fb.p);
      res.max_s = std::max(res.max_s, std::abs(gs + c * Gp));
      res.max_phi = std::max(res.max_phi, std::abs(gphi - c * Gp - Gv));
      ++res.cells;
    }
  return res;
}

double fanbeam_rhs(const ParallelBeam& G, int n_p, int n_vphi, double h) {
  const GaussRule rule = gauss_legendre(n_p);
  const double dv = kTwoPi / n_vphi;
  CompensatedSum acc;
  for (int m = 0; m < n_p; ++m) {
    double p = rule.nodes[m];
    double c = std::sqrt(1.0 - p * p);
    for (int j = 0; j < n_vphi; ++j) {
      double v = j * dv;
      double Gp = (G(p + h, v) - G(p - h, v)) / (2 * h);
      double Gv = (G(p, v + h) - G(p, v - h)) / (2 * h);
      acc.add(rule.weights[m] * dv * (c * Gp * Gp + Gp * Gv));
    }
  }
  return acc.value();
}

double l2_norm(const ScalarField& f, const Domain& domain, int n_x) {
  SphereBundleGrid g = make_sphere_bundle_grid(domain, n_x, 1, 0.0);
  CompensatedSum acc;
  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    double v = f.value(g.nodes[k]);
    acc.add(g.weights[k] * v * v);
  }
  return std::sqrt(acc.value());
}

UniquenessReport uniqueness_demo(const RefractionField& field1, const RefractionField& field2, const Domain& domain,
                                 int n_s, int n_phi, Execution exec) {
  BoundaryGrid grid = BoundaryGrid::make(domain, n_s, n_phi);
  TracerOptions def, tight;
  tight.rtol = def.rtol * 1e-2;
  tight.atol = def.atol * 1e-2;
  HodographTable t1 = build_hodograph(field1, domain, grid, exec, def);
  HodographTable t2 = build_hodograph(field2, domain, grid, exec, def);
  HodographTable t1t = build_hodograph(field1, domain, grid, exec, tight);
  HodographTable t2t = build_hodograph(field2, domain, grid, exec, tight);
  UniquenessReport r;
  r.cells = grid.included_count();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!grid.mask[k]) continue;
    r.hodograph_sup_distance = std::max(r.hodograph_sup_distance, std::abs(t2.tau[k] - t1.tau[k]));
    r.noise_floor = std::max({r.noise_floor, std::abs(t1t.tau[k] - t1.tau[k]), std::abs(t2t.tau[k] - t2.tau[k])});
  }
  r.fields_distance = l2_norm(field2.field() + field1.field().scaled(-1.0), domain);
  return r;
}

}  // namespace rigidity
