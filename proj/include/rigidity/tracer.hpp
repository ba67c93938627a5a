#pragma once

#include <limits>
#include <span>
#include <vector>

#include "rigidity/geometry.hpp"
#include "rigidity/media.hpp"

namespace rigidity {

// State along a ray of n^2 ds^2, parameterized by Euclidean arc length sigma.
struct RayState {
  Vec2 x;
  double phi = 0.0;    // direction angle, not wrapped along a path
  double tau = 0.0;    // accumulated travel time, integral of n dsigma
  double sigma = 0.0;  // accumulated Euclidean arc length
};

enum class PathStatus { interior_terminal, boundary_to_boundary, tangent, trapped };

const char* to_string(PathStatus s);

struct GeodesicPath {
  std::vector<RayState> nodes;  // entry point first
  double entry_s = 0.0;
  double entry_cosine = 0.0;    // <nu(y)|theta(y)> at the entry point, > 0
  // Boundary-to-boundary paths only.
  double exit_s = std::numeric_limits<double>::quiet_NaN();
  double exit_phi = std::numeric_limits<double>::quiet_NaN();
  double exit_cosine = std::numeric_limits<double>::quiet_NaN();  // <nu|theta> at exit, < 0
  PathStatus status = PathStatus::interior_terminal;
  std::vector<double> line_integrals;  // integral of each requested integrand, dsigma
  int accepted_steps = 0;
  int rejected_steps = 0;

  double travel_time() const { return nodes.back().tau; }
  double length() const { return nodes.back().sigma; }
  Vec2 entry_point() const { return nodes.front().x; }
  Vec2 terminal_point() const { return nodes.back().x; }
};

struct TracerOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  // > 0 switches to fixed steps of this length (no error control); used for convergence studies.
  double fixed_step = 0.0;
  double max_step_factor = 0.1;      // max step = factor * diam
  double length_cap_factor = 50.0;   // Trapped beyond factor * diam of arc length
  double min_exit_cosine = 0.01;     // TangentExit below this |<nu|theta>|
  double node_spacing = 0.0;         // > 0: add dense-output nodes so gaps never exceed this
  bool record_nodes = true;          // false: keep only the end nodes
};

struct RayDerivative {
  Vec2 dx;
  double dphi = 0.0;
  double dtau = 0.0;
};

// d/dsigma of (x, phi, tau): (cos phi, sin phi), <grad ln n, eta_hat(phi)>, n.
RayDerivative ray_rhs(const RayState& state, const RefractionField& field);

// Ray from x (interior or on the boundary) along phi until it leaves the domain.
GeodesicPath trace_forward(Vec2 x, double phi, const RefractionField& field, const Domain& domain,
                           const TracerOptions& opts = {}, std::span<const ScalarField> integrands = {});

// The geodesic arriving at interior x with direction phi, from its boundary entry y to x.
// Throws Trapped or TangentExit.
GeodesicPath trace_backward(Vec2 x, double phi, const RefractionField& field, const Domain& domain,
                            const TracerOptions& opts = {}, std::span<const ScalarField> integrands = {});

// Boundary-to-boundary chord launched from boundary arc length s_entry along phi (incoming).
GeodesicPath trace_chord(double s_entry, double phi, const RefractionField& field, const Domain& domain,
                         const TracerOptions& opts = {}, std::span<const ScalarField> integrands = {});

}  // namespace rigidity
