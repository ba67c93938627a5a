#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rigidity/geometry.hpp"
#include "rigidity/spline_grid.hpp"

namespace rigidity {

// Immutable scalar field with analytic gradient. Cheap to copy (shared model).
class ScalarField {
 public:
  class Model {
   public:
    virtual ~Model() = default;
    virtual ValueGrad eval(Vec2 x) const = 0;
  };

  ScalarField();  // identically zero
  explicit ScalarField(std::shared_ptr<const Model> model) : model_(std::move(model)) {}

  ValueGrad eval(Vec2 x) const { return model_->eval(x); }
  double value(Vec2 x) const { return model_->eval(x).value; }
  Vec2 gradient(Vec2 x) const { return model_->eval(x).grad; }

  static ScalarField constant(double c);
  // sum_k coeffs[k] * |x|^(2k)
  static ScalarField radial_polynomial(std::vector<double> coeffs);
  static ScalarField spline(const GridSamples& samples);
  // weights[i] * terms[i], summed in order.
  static ScalarField linear_combination(std::vector<double> weights, std::vector<ScalarField> terms);

  ScalarField operator+(const ScalarField& other) const;
  ScalarField scaled(double s) const;

 private:
  std::shared_ptr<const Model> model_;
};

struct Bump {
  double amplitude = 0.0;
  Vec2 center;
  double sigma = 1.0;
};

// Sum of a * exp(-|x - c|^2 / sigma^2). With a domain, each bump is multiplied by the C2 collar
// cutoff chi(x) = S(depth(x) / w), w = 0.15 diam, S the quintic smoothstep, so the sum vanishes
// identically on the boundary.
ScalarField gaussian_bumps(std::vector<Bump> bumps, const Domain* cutoff_domain);

// C2 quintic smoothstep: 0 for t <= 0, 1 for t >= 1.
double smoothstep(double t);
double smoothstep_derivative(double t);
double cutoff_width(const Domain& domain);

// True iff |f| <= tol on n_samples equally spaced boundary points.
bool vanishes_on_boundary(const ScalarField& f, const Domain& domain, int n_samples = 1000, double tol = 1e-10);

enum class MediumKind { constant, radial_polynomial, gaussian_bumps, grid_spline, composite };

const char* to_string(MediumKind kind);

// Declarative medium description, the form a scenario file takes.
struct MediumSpec {
  MediumKind kind = MediumKind::constant;
  double constant = 1.0;                      // constant
  std::vector<double> radial_coeffs;          // radial_polynomial: powers of |x|^2
  std::shared_ptr<const MediumSpec> base;     // gaussian_bumps: base medium (null: constant base_value)
  double base_value = 1.0;
  std::vector<Bump> bumps;
  bool boundary_cutoff = false;
  GridSamples grid;                           // grid_spline
};

// Field described by a spec, with no positivity requirement (perturbations, basis functions).
ScalarField build_field(const MediumSpec& spec, const Domain& domain);

// Positive refraction coefficient n on the closure of a domain.
class RefractionField {
 public:
  // Checks n > 0 on a 256x256 sample grid of the domain plus its boundary. Throws NonPositive.
  static RefractionField from_field(ScalarField field, const Domain& domain, MediumKind kind = MediumKind::composite);

  double n(Vec2 x) const { return field_.value(x); }
  Vec2 grad_n(Vec2 x) const { return field_.gradient(x); }
  ValueGrad eval(Vec2 x) const { return field_.eval(x); }

  MediumKind kind() const { return kind_; }
  double n_min() const { return n_min_; }
  const ScalarField& field() const { return field_; }

  // lambda * n (same geodesics, travel times scaled by lambda).
  RefractionField scaled(double lambda) const;
  // n + eps * f, revalidated for positivity.
  RefractionField perturbed(double eps, const ScalarField& f, const Domain& domain) const;

 private:
  RefractionField(ScalarField f, MediumKind kind, double n_min) : field_(std::move(f)), kind_(kind), n_min_(n_min) {}

  ScalarField field_;
  MediumKind kind_;
  double n_min_;
};

// Throws NonPositive (sampled n <= 0) or OutOfClass (spline grid too coarse or not covering the domain).
RefractionField make_medium(const MediumSpec& spec, const Domain& domain);

// Convenience constructors for the catalog.
MediumSpec constant_spec(double c);
MediumSpec radial_spec(std::vector<double> coeffs);
MediumSpec bumps_spec(double base_value, std::vector<Bump> bumps, bool cutoff);
MediumSpec bumps_over(MediumSpec base, std::vector<Bump> bumps, bool cutoff);

struct NonTrappingReport {
  bool ok = true;
  double worst_exit_cosine = 1.0;  // smallest |<nu|theta>| over all exits
  double max_path_length = 0.0;    // Euclidean length
  int samples = 0;
  int trapped = 0;
  int tangent_exits = 0;
};

// Traces both directions from n_samples random interior phase points (seeded, serial draw).
// ok iff every trace exits with |<nu|theta>| >= 0.01 before length 50 diam.
NonTrappingReport non_trapping_check(const RefractionField& field, const Domain& domain, int n_samples,
                                     std::uint64_t seed = 1);

}  // namespace rigidity
