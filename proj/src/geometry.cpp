#include "rigidity/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rigidity/errors.hpp"
#include "rigidity/quadrature.hpp"

namespace rigidity {

const char* to_string(DirectionClass c) {
  switch (c) {
    case DirectionClass::incoming: return "incoming";
    case DirectionClass::outgoing: return "outgoing";
    case DirectionClass::tangent: return "tangent";
  }
  return "?";
}

RadiusProfile RadiusProfile::fourier(std::vector<double> coeffs) {
  if (coeffs.empty()) throw NumericalError(ErrorKind::OutOfClass, "empty Fourier radius profile");
  RadiusProfile p;
  p.coeffs_ = std::move(coeffs);
  return p;
}

RadiusProfile RadiusProfile::custom(std::function<double(double)> r, std::function<double(double)> dr,
                                    std::function<double(double)> d2r) {
  if (!r || !dr || !d2r) throw NumericalError(ErrorKind::OutOfClass, "radius profile needs r, r', r''");
  RadiusProfile p;
  p.r_fn_ = std::move(r);
  p.dr_fn_ = std::move(dr);
  p.d2r_fn_ = std::move(d2r);
  return p;
}

double RadiusProfile::r(double a) const {
  if (r_fn_) return r_fn_(a);
  double v = coeffs_[0];
  for (std::size_t k = 1; 2 * k - 1 < coeffs_.size(); ++k) {
    double ak = coeffs_[2 * k - 1];
    double bk = 2 * k < coeffs_.size() ? coeffs_[2 * k] : 0.0;
    v += ak * std::cos(k * a) + bk * std::sin(k * a);
  }
  return v;
}

double RadiusProfile::dr(double a) const {
  if (dr_fn_) return dr_fn_(a);
  double v = 0.0;
  for (std::size_t k = 1; 2 * k - 1 < coeffs_.size(); ++k) {
    double ak = coeffs_[2 * k - 1];
    double bk = 2 * k < coeffs_.size() ? coeffs_[2 * k] : 0.0;
    v += k * (-ak * std::sin(k * a) + bk * std::cos(k * a));
  }
  return v;
}

double RadiusProfile::d2r(double a) const {
  if (d2r_fn_) return d2r_fn_(a);
  double v = 0.0;
  for (std::size_t k = 1; 2 * k - 1 < coeffs_.size(); ++k) {
    double ak = coeffs_[2 * k - 1];
    double bk = 2 * k < coeffs_.size() ? coeffs_[2 * k] : 0.0;
    v -= double(k * k) * (ak * std::cos(k * a) + bk * std::sin(k * a));
  }
  return v;
}

namespace detail {

struct CurveData {
  RadiusProfile profile;
  bool unit_disc = false;
  int panels = 0;
  std::vector<double> cumulative;  // arc length at alpha_i = i * 2pi / panels
  double total = 0.0;
  double diam = 0.0;
  double area = 0.0;
  BoundingBox box;
  GaussRule rule;

  double speed(double a) const {
    double r = profile.r(a), dr = profile.dr(a);
    return std::sqrt(r * r + dr * dr);
  }

  double partial_length(double a, double b) const {
    double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) sum += rule.weights[q] * speed(mid + half * rule.nodes[q]);
    return half * sum;
  }

  double panel_width() const { return kTwoPi / panels; }

  double arc_length(double alpha) const {
    double a = wrap_angle(alpha);
    if (unit_disc) return a;
    int i = std::min(panels - 1, int(a / panel_width()));
    return cumulative[i] + partial_length(i * panel_width(), a);
  }

  double angle(double s) const {
    double t = std::fmod(s, total);
    if (t < 0.0) t += total;
    if (unit_disc) return t;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), t);
    int i = std::clamp(int(it - cumulative.begin()) - 1, 0, panels - 1);
    double a0 = i * panel_width();
    double len = cumulative[i + 1] - cumulative[i];
    double a = a0 + panel_width() * (t - cumulative[i]) / len;
    for (int iter = 0; iter < 30; ++iter) {
      double f = cumulative[i] + partial_length(a0, a) - t;
      double step = f / speed(a);
      a -= step;
      if (std::abs(step) < 1e-15) break;
    }
    return a;
  }

  Vec2 point_at_angle(double a) const {
    double r = profile.r(a);
    return {r * std::cos(a), r * std::sin(a)};
  }

  Vec2 derivative_at_angle(double a) const {
    double r = profile.r(a), dr = profile.dr(a);
    double c = std::cos(a), s = std::sin(a);
    return {dr * c - r * s, dr * s + r * c};
  }
};

}  // namespace detail

double BoundaryCurve::total_length() const { return data_->total; }

Vec2 BoundaryCurve::point(double s) const {
  if (data_->unit_disc) return unit_from_angle(s);
  return data_->point_at_angle(data_->angle(s));
}

Vec2 BoundaryCurve::tangent(double s) const {
  if (data_->unit_disc) return perp(unit_from_angle(s));
  return normalized(data_->derivative_at_angle(data_->angle(s)));
}

Vec2 BoundaryCurve::inward_conormal(double s) const { return perp(tangent(s)); }

double BoundaryCurve::locate(Vec2 p) const { return data_->arc_length(angle_of(p)); }

double BoundaryCurve::arc_length_of_angle(double alpha) const { return data_->arc_length(alpha); }

double BoundaryCurve::angle_of_arc_length(double s) const { return data_->angle(s); }

Domain::Domain(std::shared_ptr<const detail::CurveData> data) : data_(data), boundary_(data) {}

bool Domain::is_unit_disc() const { return data_->unit_disc; }

double Domain::signed_boundary_function(Vec2 x) const {
  double r = norm(x);
  if (data_->unit_disc) return r - 1.0;
  return r - data_->profile.r(std::atan2(x.y, x.x));
}

Vec2 Domain::signed_boundary_gradient(Vec2 x) const {
  double r2 = dot(x, x);
  if (r2 == 0.0) return {0.0, 0.0};
  double r = std::sqrt(r2);
  Vec2 radial = x / r;
  if (data_->unit_disc) return radial;
  double a = std::atan2(x.y, x.x);
  return radial - data_->profile.dr(a) * (perp(x) / r2);
}

double Domain::interior_depth(Vec2 x) const {
  double sbf = signed_boundary_function(x);
  if (data_->unit_disc) return -sbf;
  double a = std::atan2(x.y, x.x);
  double r = data_->profile.r(a), dr = data_->profile.dr(a);
  return -sbf * r / std::sqrt(r * r + dr * dr);
}

Vec2 Domain::inward_normal_at(Vec2 x) const { return -normalized(signed_boundary_gradient(x)); }

double Domain::radius(double alpha) const { return data_->profile.r(alpha); }
double Domain::diameter() const { return data_->diam; }
double Domain::area() const { return data_->area; }
BoundingBox Domain::bounds() const { return data_->box; }

double Domain::conormal_cosine(double s, double phi) const {
  return dot(boundary_.inward_conormal(s), unit_from_angle(phi));
}

DirectionClass Domain::classify_direction(double s, double phi, double tol) const {
  double c = conormal_cosine(s, phi);
  if (c > tol) return DirectionClass::incoming;
  if (c < -tol) return DirectionClass::outgoing;
  return DirectionClass::tangent;
}

namespace {

void validate_profile(const RadiusProfile& p) {
  constexpr int kSamples = 4096;
  const double h = kTwoPi / kSamples;
  double scale = 0.0;
  for (int k = 0; k < kSamples; ++k) {
    double a = k * h;
    double r = p.r(a), dr = p.dr(a), d2r = p.d2r(a);
    if (!std::isfinite(r) || !std::isfinite(dr) || !std::isfinite(d2r))
      throw NumericalError(ErrorKind::OutOfClass, "radius profile is not finite");
    if (r <= 0.0)
      throw NumericalError(ErrorKind::OutOfClass, "radius profile is not positive at alpha=" + std::to_string(a));
    scale = std::max({scale, std::abs(r), std::abs(dr), std::abs(d2r)});
  }
  if (p.is_fourier()) return;
  // Simpson consistency of r with r' and of r' with r'' on each sample interval; a kink or
  // jump in either shows up as an O(1) mismatch.
  for (int k = 0; k < kSamples; ++k) {
    double a = k * h, b = a + h, m = a + 0.5 * h;
    double dr_int = h / 6.0 * (p.dr(a) + 4.0 * p.dr(m) + p.dr(b));
    double d2r_int = h / 6.0 * (p.d2r(a) + 4.0 * p.d2r(m) + p.d2r(b));
    if (std::abs(p.r(b) - p.r(a) - dr_int) > 1e-7 * scale ||
        std::abs(p.dr(b) - p.dr(a) - d2r_int) > 1e-7 * scale)
      throw NumericalError(ErrorKind::OutOfClass, "radius profile is not C2 near alpha=" + std::to_string(a));
  }
}

std::shared_ptr<detail::CurveData> build_curve(const RadiusProfile& profile, bool unit_disc) {
  auto d = std::make_shared<detail::CurveData>();
  d->profile = profile;
  d->unit_disc = unit_disc;
  d->rule = gauss_legendre(20);
  d->panels = unit_disc ? 1 : 512;
  d->cumulative.assign(d->panels + 1, 0.0);
  double area = 0.0;
  for (int i = 0; i < d->panels; ++i) {
    double a = i * d->panel_width(), b = a + d->panel_width();
    d->cumulative[i + 1] = d->cumulative[i] + d->partial_length(a, b);
    double half = 0.5 * (b - a), mid = 0.5 * (a + b), acc = 0.0;
    for (std::size_t q = 0; q < d->rule.nodes.size(); ++q) {
      double r = profile.r(mid + half * d->rule.nodes[q]);
      acc += d->rule.weights[q] * r * r;
    }
    area += 0.5 * half * acc;
  }
  d->total = unit_disc ? kTwoPi : d->cumulative.back();
  d->area = unit_disc ? kPi : area;

  constexpr int kBoxSamples = 4096;
  Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
  for (int k = 0; k < kBoxSamples; ++k) {
    Vec2 p = d->point_at_angle(k * kTwoPi / kBoxSamples);
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  if (unit_disc) {
    d->diam = 2.0;
  } else {
    constexpr int kDiamSamples = 720;
    std::vector<Vec2> pts(kDiamSamples);
    for (int k = 0; k < kDiamSamples; ++k) pts[k] = d->point_at_angle(k * kTwoPi / kDiamSamples);
    double best = 0.0;
    for (int i = 0; i < kDiamSamples; ++i)
      for (int j = i + 1; j < kDiamSamples; ++j) best = std::max(best, norm(pts[i] - pts[j]));
    d->diam = best;
  }
  double pad = 1e-3 * d->diam;
  d->box = {{lo.x - pad, lo.y - pad}, {hi.x + pad, hi.y + pad}};
  return d;
}

}  // namespace

Domain unit_disc() { return Domain(build_curve(RadiusProfile::fourier({1.0}), true)); }

Domain star_shaped_domain(const RadiusProfile& profile) {
  validate_profile(profile);
  return Domain(build_curve(profile, false));
}

}  // namespace rigidity
