#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rigidity/geometry.hpp"
#include "rigidity/media.hpp"
#include "rigidity/parallel.hpp"
#include "rigidity/tracer.hpp"

namespace rigidity {

// Travel time tau(x, phi) of the geodesic arriving at interior x with direction phi.
// For x on the boundary: the chord launched from x along phi if phi is incoming, 0 otherwise.
double tau_at(Vec2 x, double phi, const RefractionField& field, const Domain& domain, const TracerOptions& opts = {});

struct GradientOptions {
  double h_factor = 1e-5;  // h = h_factor * diam
  bool richardson = true;  // combine steps h and h/2
  double identity_tol = 1e-3;
  TracerOptions tracer = [] {
    TracerOptions t;
    t.rtol = 1e-11;
    t.atol = 1e-14;
    t.record_nodes = false;
    return t;
  }();

  // Cheaper settings for bulk volume quadrature.
  static GradientOptions bulk();
};

struct GradientSample {
  Vec2 x;
  double phi = 0.0;
  Vec2 dtau;          // d_x tau
  Vec2 e;             // dtau / |dtau|
  double omega = 0.0; // atan2(<dtau, eta_hat>, <dtau, theta_hat>)
  double n_at_x = 0.0;
  double dphi_tau = 0.0;  // d tau / d phi at fixed x
  double kappa = 0.0;     // d phi / d sigma of the ray at x

  double cos_omega() const { return std::cos(omega); }
  // <dtau | theta> / n - 1
  double identity_residual() const;
  // (<dtau | theta> + kappa dphi_tau) / n - 1, the derivative of tau along the ray.
  double flow_residual() const;
};

// Central differences of tau_at in x and phi. Throws IdentityViolation if the derivative of tau
// along the ray misses n(x) by more than opts.identity_tol relative, InvalidArgument if x is
// within 2h of the boundary.
GradientSample grad_x_tau(Vec2 x, double phi, const RefractionField& field, const Domain& domain,
                          const GradientOptions& opts = {});

// Uniform grid on Gamma x S^1: s_i = i L / n_s, phi_j = j 2pi / n_phi. Cells with
// <nu|theta> <= margin are excluded (mask 0).
struct BoundaryGrid {
  int n_s = 0;
  int n_phi = 0;
  double total_length = 0.0;
  double margin = 0.05;
  std::vector<std::uint8_t> mask;

  static BoundaryGrid make(const Domain& domain, int n_s, int n_phi, double margin = 0.05);

  double ds() const { return total_length / n_s; }
  double dphi() const { return kTwoPi / n_phi; }
  double s(int i) const { return i * ds(); }
  double phi(int j) const { return j * dphi(); }
  std::size_t index(int i, int j) const { return std::size_t(i) * n_phi + j; }
  std::size_t size() const { return std::size_t(n_s) * n_phi; }
  bool included(int i, int j) const { return mask[index(i, j)] != 0; }
  int included_count() const;
  bool same_as(const BoundaryGrid& other) const;
};

struct HodographTable {
  BoundaryGrid grid;
  std::vector<double> tau;     // 0 on excluded cells
  std::vector<double> exit_s;  // NaN on excluded cells
  std::vector<double> exit_phi;

  double at(int i, int j) const { return tau[grid.index(i, j)]; }
};

HodographTable build_hodograph(const RefractionField& field, const Domain& domain, int n_s, int n_phi,
                               Execution exec = Execution::parallel, const TracerOptions& opts = {});
// Same, on a given grid.
HodographTable build_hodograph(const RefractionField& field, const Domain& domain, const BoundaryGrid& grid,
                               Execution exec = Execution::parallel, const TracerOptions& opts = {});

// Periodic 4th-order central differences of a table in s and phi.
struct GridDerivatives {
  std::vector<double> d_s;
  std::vector<double> d_phi;
};
GridDerivatives periodic_derivatives(const BoundaryGrid& grid, const std::vector<double>& values, int stride = 1);

struct RhoTable {
  BoundaryGrid grid;
  std::vector<double> rho;
  std::vector<double> d_s_rho;
  std::vector<double> d_phi_rho;
};

// rho = tau2 - tau1. Throws GridMismatch.
RhoTable build_rho(const HodographTable& table1, const HodographTable& table2);

// --- two-point travel times -----------------------------------------------------------

// Chord from boundary arc length s_entry whose exit lands on s_exit, by secant iteration on the
// launch angle starting from phi_guess (this selects the branch). Throws Diverged.
GeodesicPath shoot_two_point(double s_entry, double s_exit, double phi_guess, const RefractionField& field,
                             const Domain& domain, const TracerOptions& opts = {},
                             std::span<const ScalarField> integrands = {});

// Launch angle of the straight chord from s_entry to s_exit.
double straight_chord_angle(const Domain& domain, double s_entry, double s_exit);

// T(s_y, s_x) on the stencil s_x = center + m ds, m = -half .. half, along one branch.
struct TwoPointTable {
  double s_y = 0.0;
  double center = 0.0;
  double ds = 0.0;
  std::vector<double> s_x;
  std::vector<double> T;
  std::vector<double> launch_phi;
  std::vector<double> exit_phi;  // exit direction of each chord from the tracer
};

TwoPointTable build_two_point_table(const RefractionField& field, const Domain& domain, double s_y, double s_x,
                                    double ds, int half = 2, double phi_guess = std::numeric_limits<double>::quiet_NaN(),
                                    const TracerOptions& opts = {});

struct ExitAngle {
  double dT_ds = 0.0;
  double sin_psi = 0.0;
  double psi = 0.0;
  double phi = 0.0;  // psi + beta + pi, beta = arg nu(x), wrapped to [0, 2pi)
  bool clamped = false;
};

// sin psi = (1/n(x)) dT/ds_x at the table center. Throws OutOfRange if |sin psi| > 1 + 1e-6.
ExitAngle exit_angle_from_hodograph(const TwoPointTable& table, const RefractionField& field, const Domain& domain);

// --- line integrals along a recorded path -------------------------------------------------

// Integral of b over Euclidean arc length along path, using cubic Hermite interpolation of the
// nodes (positions and unit tangents) and Gauss-Legendre per segment.
double jacobian_row(const GeodesicPath& path, const ScalarField& basis_k);

}  // namespace rigidity
