#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "rigidity/vec2.hpp"

namespace rigidity {

enum class DirectionClass { incoming, outgoing, tangent };

const char* to_string(DirectionClass c);

// Periodic radius profile r(alpha) > 0 of a star-shaped boundary, with first and second
// derivatives. Either a finite Fourier series or user-supplied callables.
class RadiusProfile {
 public:
  // r(a) = a0 + sum_k (a_k cos(k a) + b_k sin(k a)); coefficients laid out [a0, a1, b1, a2, b2, ...].
  static RadiusProfile fourier(std::vector<double> coeffs);
  static RadiusProfile custom(std::function<double(double)> r, std::function<double(double)> dr,
                              std::function<double(double)> d2r);

  double r(double a) const;
  double dr(double a) const;
  double d2r(double a) const;

  bool is_fourier() const { return !r_fn_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

 private:
  std::vector<double> coeffs_;
  std::function<double(double)> r_fn_, dr_fn_, d2r_fn_;
};

struct BoundingBox {
  Vec2 lo;
  Vec2 hi;
};

namespace detail {
struct CurveData;
}

// Closed, counterclockwise, C2 boundary curve parameterized by arc length s in [0, total_length).
class BoundaryCurve {
 public:
  explicit BoundaryCurve(std::shared_ptr<const detail::CurveData> data) : data_(std::move(data)) {}

  double total_length() const;
  Vec2 point(double s) const;
  Vec2 tangent(double s) const;
  // Unit inward normal: the tangent rotated by +pi/2.
  Vec2 inward_conormal(double s) const;
  // Arc length of the boundary point hit by the ray from the origin through p.
  double locate(Vec2 p) const;
  // Polar angle <-> arc length maps of the underlying star-shaped description.
  double arc_length_of_angle(double alpha) const;
  double angle_of_arc_length(double s) const;

 private:
  std::shared_ptr<const detail::CurveData> data_;
};

// Closed bounded star-shaped domain (w.r.t. the origin) with C2 boundary.
class Domain {
 public:
  explicit Domain(std::shared_ptr<const detail::CurveData> data);

  const BoundaryCurve& boundary() const { return boundary_; }
  bool is_unit_disc() const;

  bool inside(Vec2 x) const { return signed_boundary_function(x) < 0.0; }
  // |x| - r(arg x): negative inside, zero on the boundary.
  double signed_boundary_function(Vec2 x) const;
  Vec2 signed_boundary_gradient(Vec2 x) const;
  // First-order normal distance to the boundary (exact for the disc); positive inside.
  double interior_depth(Vec2 x) const;
  // Inward unit normal at (or near) a boundary point, from the level-set gradient.
  Vec2 inward_normal_at(Vec2 x) const;

  double radius(double alpha) const;
  double diameter() const;
  double area() const;
  BoundingBox bounds() const;

  DirectionClass classify_direction(double s, double phi, double tol = 1e-10) const;
  double conormal_cosine(double s, double phi) const;

 private:
  std::shared_ptr<const detail::CurveData> data_;
  BoundaryCurve boundary_;
};

// Positively oriented orthonormal covector frame on the circle bundle.
struct AngularFrame {
  static Vec2 theta_hat(double phi) { return unit_from_angle(phi); }
  static Vec2 eta_hat(double phi) { return perp(unit_from_angle(phi)); }
  // theta_hat ^ eta_hat evaluated on (e1, e2); identically +1.
  static double orientation(double phi) { return cross(theta_hat(phi), eta_hat(phi)); }
};

Domain unit_disc();
// Throws NumericalError(OutOfClass) for non-positive, non-finite or non-smooth profiles.
Domain star_shaped_domain(const RadiusProfile& profile);

}  // namespace rigidity
