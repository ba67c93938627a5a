#include "rigidity/media.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rigidity/errors.hpp"

namespace rigidity {

namespace {

class ConstantModel final : public ScalarField::Model {
 public:
  explicit ConstantModel(double c) : c_(c) {}
  ValueGrad eval(Vec2) const override { return {c_, {0.0, 0.0}}; }

 private:
  double c_;
};

class RadialPolynomialModel final : public ScalarField::Model {
 public:
  explicit RadialPolynomialModel(std::vector<double> c) : c_(std::move(c)) {}
  ValueGrad eval(Vec2 x) const override {
    double r2 = dot(x, x);
    // Horner in r2 for the value and d/d(r2).
    double v = 0.0, dv = 0.0;
    for (std::size_t k = c_.size(); k-- > 0;) {
      dv = dv * r2 + v;
      v = v * r2 + c_[k];
    }
    return {v, 2.0 * dv * x};
  }

 private:
  std::vector<double> c_;
};

class SplineModel final : public ScalarField::Model {
 public:
  explicit SplineModel(const GridSamples& g) : grid_(g) {}
  ValueGrad eval(Vec2 x) const override { return grid_.eval(x); }
  const CubicSplineGrid& grid() const { return grid_; }

 private:
  CubicSplineGrid grid_;
};

class CombinationModel final : public ScalarField::Model {
 public:
  CombinationModel(std::vector<double> w, std::vector<ScalarField> t) : w_(std::move(w)), t_(std::move(t)) {}
  ValueGrad eval(Vec2 x) const override {
    ValueGrad out;
    for (std::size_t i = 0; i < t_.size(); ++i) {
      ValueGrad vg = t_[i].eval(x);
      out.value += w_[i] * vg.value;
      out.grad += w_[i] * vg.grad;
    }
    return out;
  }

 private:
  std::vector<double> w_;
  std::vector<ScalarField> t_;
};

class BumpsModel final : public ScalarField::Model {
 public:
  BumpsModel(std::vector<Bump> bumps, const Domain* domain) : bumps_(std::move(bumps)) {
    if (domain) {
      domain_ = std::make_shared<Domain>(*domain);
      width_ = cutoff_width(*domain);
    }
  }

  ValueGrad eval(Vec2 x) const override {
    ValueGrad out;
    for (const Bump& b : bumps_) {
      Vec2 d = x - b.center;
      double s2 = b.sigma * b.sigma;
      double g = b.amplitude * std::exp(-dot(d, d) / s2);
      out.value += g;
      out.grad += (-2.0 * g / s2) * d;
    }
    if (!domain_) return out;
    double t = -domain_->signed_boundary_function(x) / width_;
    if (t >= 1.0) return out;
    if (t <= 0.0) return {};
    double chi = smoothstep(t);
    Vec2 dchi = (-smoothstep_derivative(t) / width_) * domain_->signed_boundary_gradient(x);
    return {chi * out.value, chi * out.grad + out.value * dchi};
  }

 private:
  std::vector<Bump> bumps_;
  std::shared_ptr<const Domain> domain_;
  double width_ = 0.0;
};

}  // namespace

ScalarField::ScalarField() : model_(std::make_shared<ConstantModel>(0.0)) {}

ScalarField ScalarField::constant(double c) { return ScalarField(std::make_shared<ConstantModel>(c)); }

ScalarField ScalarField::radial_polynomial(std::vector<double> coeffs) {
  return ScalarField(std::make_shared<RadialPolynomialModel>(std::move(coeffs)));
}

ScalarField ScalarField::spline(const GridSamples& samples) { return ScalarField(std::make_shared<SplineModel>(samples)); }

ScalarField ScalarField::linear_combination(std::vector<double> weights, std::vector<ScalarField> terms) {
  if (weights.size() != terms.size()) throw NumericalError(ErrorKind::InvalidArgument, "linear_combination: size mismatch");
  return ScalarField(std::make_shared<CombinationModel>(std::move(weights), std::move(terms)));
}

ScalarField ScalarField::operator+(const ScalarField& other) const {
  return linear_combination({1.0, 1.0}, {*this, other});
}

ScalarField ScalarField::scaled(double s) const { return linear_combination({s}, {*this}); }

ScalarField gaussian_bumps(std::vector<Bump> bumps, const Domain* cutoff_domain) {
  for (const Bump& b : bumps)
    if (!(b.sigma > 0.0)) throw NumericalError(ErrorKind::InvalidArgument, "bump sigma must be positive");
  return ScalarField(std::make_shared<BumpsModel>(std::move(bumps), cutoff_domain));
}

double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double smoothstep_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  double u = t * (1.0 - t);
  return 30.0 * u * u;
}

double cutoff_width(const Domain& domain) { return 0.15 * domain.diameter(); }

bool vanishes_on_boundary(const ScalarField& f, const Domain& domain, int n_samples, double tol) {
  const auto& b = domain.boundary();
  for (int k = 0; k < n_samples; ++k)
    if (std::abs(f.value(b.point(k * b.total_length() / n_samples))) > tol) return false;
  return true;
}

const char* to_string(MediumKind kind) {
  switch (kind) {
    case MediumKind::constant: return "constant";
    case MediumKind::radial_polynomial: return "radial_polynomial";
    case MediumKind::gaussian_bumps: return "gaussian_bumps";
    case MediumKind::grid_spline: return "grid_spline";
    case MediumKind::composite: return "composite";
  }
  return "?";
}

ScalarField build_field(const MediumSpec& spec, const Domain& domain) {
  switch (spec.kind) {
    case MediumKind::constant:
      return ScalarField::constant(spec.constant);
    case MediumKind::radial_polynomial:
      if (spec.radial_coeffs.empty()) throw NumericalError(ErrorKind::InvalidArgument, "radial_polynomial needs coefficients");
      return ScalarField::radial_polynomial(spec.radial_coeffs);
    case MediumKind::gaussian_bumps: {
      ScalarField base = spec.base ? build_field(*spec.base, domain) : ScalarField::constant(spec.base_value);
      if (spec.bumps.empty()) return base;
      return base + gaussian_bumps(spec.bumps, spec.boundary_cutoff ? &domain : nullptr);
    }
    case MediumKind::grid_spline: {
      const GridSamples& g = spec.grid;
      if (g.nx < 4 || g.ny < 4) throw NumericalError(ErrorKind::OutOfClass, "grid_spline needs at least 4x4 knots");
      BoundingBox box = domain.bounds();
      double xmax = g.x0 + g.dx * (g.nx - 1), ymax = g.y0 + g.dy * (g.ny - 1);
      if (g.x0 > box.lo.x || g.y0 > box.lo.y || xmax < box.hi.x || ymax < box.hi.y)
        throw NumericalError(ErrorKind::OutOfClass, "grid_spline knots do not cover the domain");
      // At least 8 knot intervals across the domain in each direction.
      double span = std::min(box.hi.x - box.lo.x, box.hi.y - box.lo.y);
      if (g.dx > span / 8.0 || g.dy > span / 8.0)
        throw NumericalError(ErrorKind::OutOfClass, "grid_spline knots too coarse for C2 interpolation");
      return ScalarField::spline(g);
    }
    case MediumKind::composite:
      break;
  }
  throw NumericalError(ErrorKind::InvalidArgument, "unsupported medium kind");
}

RefractionField RefractionField::from_field(ScalarField field, const Domain& domain, MediumKind kind) {
  constexpr int kGrid = 256;
  BoundingBox box = domain.bounds();
  double n_min = std::numeric_limits<double>::infinity();
  Vec2 where;
  for (int j = 0; j < kGrid; ++j) {
    for (int i = 0; i < kGrid; ++i) {
      Vec2 x{box.lo.x + (box.hi.x - box.lo.x) * (i + 0.5) / kGrid, box.lo.y + (box.hi.y - box.lo.y) * (j + 0.5) / kGrid};
      if (!domain.inside(x)) continue;
      double v = field.value(x);
      if (!(v >= n_min)) { n_min = v; where = x; }
    }
  }
  const auto& b = domain.boundary();
  for (int k = 0; k < 1024; ++k) {
    Vec2 x = b.point(k * b.total_length() / 1024);
    double v = field.value(x);
    if (!(v >= n_min)) { n_min = v; where = x; }
  }
  if (!(n_min > 0.0))
    throw NumericalError(ErrorKind::NonPositive, "refraction coefficient min " + std::to_string(n_min) + " at (" +
                                                     std::to_string(where.x) + ", " + std::to_string(where.y) + ")");
  return RefractionField(std::move(field), kind, n_min);
}

RefractionField RefractionField::scaled(double lambda) const {
  if (!(lambda > 0.0)) throw NumericalError(ErrorKind::NonPositive, "scaling factor must be positive");
  return RefractionField(field_.scaled(lambda), kind_, lambda * n_min_);
}

RefractionField RefractionField::perturbed(double eps, const ScalarField& f, const Domain& domain) const {
  return from_field(ScalarField::linear_combination({1.0, eps}, {field_, f}), domain, MediumKind::composite);
}

RefractionField make_medium(const MediumSpec& spec, const Domain& domain) {
  return RefractionField::from_field(build_field(spec, domain), domain, spec.kind);
}

MediumSpec constant_spec(double c) {
  MediumSpec s;
  s.kind = MediumKind::constant;
  s.constant = c;
  return s;
}

MediumSpec radial_spec(std::vector<double> coeffs) {
  MediumSpec s;
  s.kind = MediumKind::radial_polynomial;
  s.radial_coeffs = std::move(coeffs);
  return s;
}

MediumSpec bumps_spec(double base_value, std::vector<Bump> bumps, bool cutoff) {
  MediumSpec s;
  s.kind = MediumKind::gaussian_bumps;
  s.base_value = base_value;
  s.bumps = std::move(bumps);
  s.boundary_cutoff = cutoff;
  return s;
}

MediumSpec bumps_over(MediumSpec base, std::vector<Bump> bumps, bool cutoff) {
  MediumSpec s = bumps_spec(0.0, std::move(bumps), cutoff);
  s.base = std::make_shared<const MediumSpec>(std::move(base));
  return s;
}

}  // namespace rigidity
