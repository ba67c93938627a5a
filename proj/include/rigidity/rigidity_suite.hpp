#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rigidity/hodograph.hpp"

namespace rigidity {

// |LHS - RHS| of the phi-derivative identity
//   cos(w1-w2)(d1+d2)/(cos w1 cos w2) + sin(w2-w1)(cos w2 sin w1 d1 - cos w1 sin w2 d2)/(cos^2 w1 cos^2 w2)
//     = d1/cos^2 w1 + d2/cos^2 w2,
// evaluated in extended precision.
double lemma_phi_identity_residual(double w1, double w2, double d1, double d2);
// The same with sin(w1-w2) in the second term. This version is an identity.
double lemma_phi_identity_residual_corrected(double w1, double w2, double d1, double d2);

// (n2/cos w2)^2 + (n1/cos w1)^2 - 2 cos(w1-w2) n1 n2 / (cos w1 cos w2)
double rnn_bracket(double n1, double n2, double w1, double w2);

struct GridSpec {
  int n_x = 32;    // radial and angular node count of the volume grid
  int n_phi = 64;  // directions per volume node, and boundary grid phi count
  int n_s = 64;    // boundary arc-length count

  std::string str() const;
};

// Polar Gauss-Legendre nodes (n_x radial x n_x angular) on {|x| <= r(alpha) - collar}, times
// n_phi uniform directions.
struct SphereBundleGrid {
  std::vector<Vec2> nodes;
  std::vector<double> weights;  // area weights, sum = covered_area
  int n_r = 0;
  int n_alpha = 0;
  int n_phi = 0;
  double collar = 0.0;
  double covered_area = 0.0;
  double collar_area = 0.0;  // area(domain) - covered_area

  double dphi() const { return kTwoPi / n_phi; }
  double phi(int j) const { return j * dphi(); }
  std::size_t cells() const { return nodes.size() * std::size_t(n_phi); }
};

SphereBundleGrid make_sphere_bundle_grid(const Domain& domain, int n_x, int n_phi, double collar_factor = 0.02);

struct LhsResult {
  double value = 0.0;                // sum w dphi (n2/cos w2 - n1/cos w1)^2
  double value_gradient_norm = 0.0;  // same with |d_x tau_i| in place of n_i/cos w_i
  double max_identity_residual = 0.0;  // max |<d_x tau|theta>/n - 1| over both fields
  double max_flow_residual = 0.0;
};

LhsResult inequality_lhs(const RefractionField& field1, const RefractionField& field2, const Domain& domain,
                         const SphereBundleGrid& grid, Execution exec = Execution::parallel,
                         const GradientOptions& opts = GradientOptions::bulk());

// -sum d_s v d_phi v ds dphi over the periodic (s, phi) grid, with the stride-2 value for a
// Richardson error estimate of the 4th-order differences.
struct StokesIntegral {
  double value = 0.0;
  double coarse_value = 0.0;
  double richardson_error = 0.0;  // |value - coarse_value| / 15
};
StokesIntegral stokes_integral(const BoundaryGrid& grid, const std::vector<double>& values);

// Throws GridTooCoarse if the Richardson error estimate exceeds 10% of the value.
double inequality_rhs(const RhoTable& rho);

struct InequalityLevel {
  GridSpec grid;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double rhs_richardson_error = 0.0;
  double lhs_gradient_norm = 0.0;
  double max_identity_residual = 0.0;
  double max_flow_residual = 0.0;
  double covered_area = 0.0;
  double collar_area = 0.0;
  double seconds = 0.0;
};

struct InequalityReport {
  std::string label;
  InequalityLevel coarse;
  InequalityLevel fine;
  double lhs = 0.0;  // fine level
  double rhs = 0.0;
  double margin = 0.0;
  double drift = 0.0;     // max(|lhs_f - lhs_c|, |rhs_f - rhs_c|)
  double tol_grid = 0.0;  // max(2% of rhs, drift)
  double collar = 0.0;
  double collar_halved_lhs = 0.0;  // coarse lhs with the collar halved (sensitivity)
  double tangency_margin = 0.05;
  bool holds = false;  // lhs <= rhs + tol_grid at both levels

  std::string summary() const;
};

struct VerifyOptions {
  Execution exec = Execution::parallel;
  double collar_factor = 0.02;
  bool collar_sensitivity = true;
  GradientOptions gradient = GradientOptions::bulk();
  TracerOptions tracer;
};

// Theorem check for a pair with n1 = n2 on the boundary, at two resolutions.
InequalityReport verify_inequality(const RefractionField& field1, const RefractionField& field2, const Domain& domain,
                                   const GridSpec& coarse, const GridSpec& fine, const VerifyOptions& opts = {});

// --- X-ray transform and (fg) ---------------------------------------------------------------

// Integral of f dsigma along the geodesic of field launched from s along phi (incoming).
double xray_transform(const ScalarField& f, const RefractionField& field, const Domain& domain, double s, double phi,
                      const TracerOptions& opts = {});

struct XrayTable {
  BoundaryGrid grid;
  std::vector<double> g;  // 0 on excluded cells
};

XrayTable build_xray_table(const ScalarField& f, const RefractionField& field, const Domain& domain,
                           const BoundaryGrid& grid, Execution exec = Execution::parallel, const TracerOptions& opts = {});

// sum w_k f(x_k)^2 sum_j dphi / cos^2 w(x_k, phi_j), cos w from the gradient of tau.
double fg_lhs(const ScalarField& f, const RefractionField& field, const Domain& domain, const SphereBundleGrid& grid,
              Execution exec = Execution::parallel, const GradientOptions& opts = GradientOptions::bulk());

InequalityReport fg_inequality(const ScalarField& f, const RefractionField& field, const Domain& domain,
                               const GridSpec& coarse, const GridSpec& fine, const VerifyOptions& opts = {});

// (T_{n+eps f} - T_n)/eps against the X-ray transform over the included cells of an n_s x n_phi
// grid. Errors are sup-norm relative to sup |g|.
struct LinearizationCheck {
  double eps = 0.0;
  double two_point_error = 0.0;        // endpoints pinned: perturbed chord re-shot to the same exit
  double direction_pinned_error = 0.0; // same launch direction, exit point free
  int chords = 0;
};

LinearizationCheck linearization_check(const ScalarField& f, const RefractionField& field, const Domain& domain,
                                       double eps, int n_s = 32, int n_phi = 32, Execution exec = Execution::parallel);

// --- unit disc example ---------------------------------------------------------------------

// 2 pi sqrt((1 + r)/(1 - r)). Throws OutOfRange unless 0 <= r < 1.
double disc_weight_closed_form(double r);
// 2 pi / sqrt(1 - r^2): the value of the integral below in closed form.
double disc_weight_straight_line(double r);
// sum_j dphi / cos^2 w(x, phi_j) at x = (r, 0), cos w = <nu(y), theta> for straight lines.
double disc_weight_quadrature(double r, int n_phi);
// <nu(y), theta> for the straight line arriving at x with direction phi in the unit disc.
double disc_straight_cos_omega(Vec2 x, double phi);

// --- fan-beam coordinates on the unit disc -------------------------------------------------

struct FanBeam {
  double p = 0.0;
  double vphi = 0.0;
};

// p = sin(s - phi), vphi = phi + pi/2.
FanBeam fanbeam_map(double s, double phi);
// Incoming (s, phi) with fanbeam_map(s, phi) = (p, vphi). Throws OutOfRange for |p| >= 1.
std::pair<double, double> fanbeam_inverse(double p, double vphi);

// Parallel-beam data G(p, vphi) = integral of f over the line <x, (cos vphi, sin vphi)> = p.
using ParallelBeam = std::function<double(double p, double vphi)>;
ParallelBeam straight_parallel_beam(const ScalarField& f, int n_quad = 64);

struct ChainRuleResidual {
  double max_s = 0.0;    // max |g_s + sqrt(1-p^2) G_p|
  double max_phi = 0.0;  // max |g_phi - sqrt(1-p^2) G_p - G_vphi|
  int cells = 0;
};

// g(s, phi) = G(fanbeam_map(s, phi)) differentiated both ways on an n_s x n_phi grid of incoming
// directions with |p| <= p_max.
ChainRuleResidual chain_rule_residual(const ParallelBeam& G, int n_s = 64, int n_phi = 64, double p_max = 0.95,
                                      double h = 1e-4);

// Integral of (sqrt(1-p^2) G_p^2 + G_p G_vphi) dp dvphi (Gauss-Legendre in p, uniform in vphi).
double fanbeam_rhs(const ParallelBeam& G, int n_p = 96, int n_vphi = 128, double h = 1e-5);

// --- uniqueness ----------------------------------------------------------------------------

struct UniquenessReport {
  double hodograph_sup_distance = 0.0;
  double fields_distance = 0.0;  // L2(domain) of n2 - n1
  double noise_floor = 0.0;      // sup |tau - tau_tight| over both fields (tight = 100x smaller rtol)
  int cells = 0;
};

UniquenessReport uniqueness_demo(const RefractionField& field1, const RefractionField& field2, const Domain& domain,
                                 int n_s = 64, int n_phi = 64, Execution exec = Execution::parallel);

// L2(domain) norm of f on a full polar Gauss grid.
double l2_norm(const ScalarField& f, const Domain& domain, int n_x = 64);

}  // namespace rigidity
