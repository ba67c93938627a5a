#include "rigidity/tracer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "rigidity/errors.hpp"

namespace rigidity {

const char* to_string(PathStatus s) {
  switch (s) {
    case PathStatus::interior_terminal: return "interior_terminal";
    case PathStatus::boundary_to_boundary: return "boundary_to_boundary";
    case PathStatus::tangent: return "tangent";
    case PathStatus::trapped: return "trapped";
  }
  return "?";
}

RayDerivative ray_rhs(const RayState& state, const RefractionField& field) {
  ValueGrad ng = field.eval(state.x);
  double c = std::cos(state.phi), s = std::sin(state.phi);
  return {{c, s}, (-s * ng.grad.x + c * ng.grad.y) / ng.value, ng.value};
}

namespace {

// Dormand-Prince 5(4), FSAL, with the standard 4th-order continuous extension.
namespace dp {
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = -71.0 / 57600, e3 = 71.0 / 16695, e4 = -71.0 / 1920, e5 = 17253.0 / 339200, e6 = -22.0 / 525,
                 e7 = 1.0 / 40;
// Dense output polynomial coefficients (theta, theta^2, theta^3, theta^4) per stage.
constexpr std::array<std::array<double, 4>, 7> P = {{
    {1.0, -8048581381.0 / 2820520608, 8663915743.0 / 2820520608, -12715105075.0 / 11282082432},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 131558114200.0 / 32700410799, -68118460800.0 / 10900136933, 87487479700.0 / 32700410799},
    {0.0, -1754552775.0 / 470086768, 14199869525.0 / 1410260304, -10690763975.0 / 1880347072},
    {0.0, 127303824393.0 / 49829197408, -318862633887.0 / 49829197408, 701980252875.0 / 199316789632},
    {0.0, -282668133.0 / 205662961, 2019193451.0 / 616988883, -1453857185.0 / 822651844},
    {0.0, 40617522.0 / 29380423, -110615467.0 / 29380423, 69997945.0 / 29380423},
}};
}  // namespace dp

class RayIntegrator {
 public:
  RayIntegrator(const RefractionField& field, const Domain& domain, const TracerOptions& opts,
                std::span<const ScalarField> integrands)
      : field_(field), domain_(domain), opts_(opts), integrands_(integrands), dim_(4 + integrands.size()) {
    for (auto& k : k_) k.assign(dim_, 0.0);
    y0_.assign(dim_, 0.0);
    y1_.assign(dim_, 0.0);
    tmp_.assign(dim_, 0.0);
    err_.assign(dim_, 0.0);
  }

  struct Result {
    std::vector<RayState> nodes;
    RayState final;
    std::vector<double> integrals;
    double exit_cosine = 0.0;
    int accepted = 0;
    int rejected = 0;
  };

  Result run(Vec2 x0, double phi0, bool start_on_boundary) {
    const double diam = domain_.diameter();
    const double max_step = opts_.max_step_factor * diam;
    const double cap = opts_.length_cap_factor * diam;
    const bool fixed = opts_.fixed_step > 0.0;
    std::fill(y0_.begin(), y0_.end(), 0.0);
    y0_[0] = x0.x;
    y0_[1] = x0.y;
    y0_[2] = phi0;
    n_ref_ = field_.n(x0);
    double sigma = 0.0;
    double h = fixed ? opts_.fixed_step : std::min(0.01 * diam, max_step);
    bool first = true;

    Result res;
    res.nodes.push_back(state_of(y0_, sigma));
    rhs(y0_.data(), k_[0].data());

    for (;;) {
      if (res.accepted + res.rejected > 5'000'000)
        throw NumericalError(ErrorKind::Trapped, "step budget exhausted");
      step(h);
      double err = fixed ? 0.0 : error_norm();
      if (err > 1.0) {
        h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        ++res.rejected;
        if (h < 1e-14 * diam) throw NumericalError(ErrorKind::Trapped, "step size underflow");
        continue;
      }
      ++res.accepted;

      double g1 = domain_.signed_boundary_function({y1_[0], y1_[1]});
      if (g1 >= 0.0) {
        double lo = 0.0, hi = 1.0;
        bool bracketed = true;
        if (first && start_on_boundary) bracketed = bracket_from_boundary(h, lo, hi);
        if (!bracketed) throw NumericalError(ErrorKind::TangentExit, "ray does not enter the domain");
        if (opts_.record_nodes && opts_.node_spacing > 0.0) add_dense_nodes(res.nodes, sigma, h, lo);
        finish(res, sigma, h, lo, hi);
        return res;
      }

      if (opts_.record_nodes) {
        if (opts_.node_spacing > 0.0) add_dense_nodes(res.nodes, sigma, h, 1.0);
        res.nodes.push_back(state_of(y1_, sigma + h));
      }
      sigma += h;
      if (sigma > cap) throw NumericalError(ErrorKind::Trapped, "path length exceeds " + std::to_string(cap));
      std::swap(y0_, y1_);
      std::swap(k_[0], k_[6]);
      first = false;
      if (!fixed) {
        double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h = std::min(max_step, h * std::clamp(fac, 0.2, 5.0));
      }
    }
  }

 private:
  RayState state_of(const std::vector<double>& y, double sigma) const {
    return {{y[0], y[1]}, y[2], y[3], sigma};
  }

  void rhs(const double* y, double* dy) const {
    Vec2 x{y[0], y[1]};
    ValueGrad ng = field_.eval(x);
    double c = std::cos(y[2]), s = std::sin(y[2]);
    dy[0] = c;
    dy[1] = s;
    dy[2] = (-s * ng.grad.x + c * ng.grad.y) / ng.value;
    dy[3] = ng.value;
    for (std::size_t i = 0; i < integrands_.size(); ++i) dy[4 + i] = integrands_[i].value(x);
  }

  // y1 = one DP step of size h from y0 (k_[0] = f(y0) must be current); k_[6] = f(y1).
  void step(double h) {
    using namespace dp;
    const std::size_t d = dim_;
    auto stage = [&](std::vector<double>& out, auto&& combo) {
      for (std::size_t i = 0; i < d; ++i) tmp_[i] = y0_[i] + h * combo(i);
      rhs(tmp_.data(), out.data());
    };
    auto& k1 = k_[0];
    auto& k2 = k_[1];
    auto& k3 = k_[2];
    auto& k4 = k_[3];
    auto& k5 = k_[4];
    auto& k6 = k_[5];
    auto& k7 = k_[6];
    stage(k2, [&](std::size_t i) { return a21 * k1[i]; });
    stage(k3, [&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; });
    stage(k4, [&](std::size_t i) { return a41 * k1[i] + a42 * k2[i] + a43 * k3[i]; });
    stage(k5, [&](std::size_t i) { return a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]; });
    stage(k6, [&](std::size_t i) { return a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]; });
    for (std::size_t i = 0; i < d; ++i)
      y1_[i] = y0_[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(y1_.data(), k7.data());
    for (std::size_t i = 0; i < d; ++i)
      err_[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  }

  double error_norm() const {
    const double diam = domain_.diameter();
    double acc = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      double sc;
      if (i < 2)
        sc = opts_.atol + opts_.rtol * diam;
      else if (i == 2)
        sc = opts_.atol + opts_.rtol;
      else if (i == 3)
        sc = opts_.atol * n_ref_ + opts_.rtol * std::max(std::abs(y0_[i]), std::abs(y1_[i]));
      else
        sc = opts_.atol + opts_.rtol * std::max(std::abs(y0_[i]), std::abs(y1_[i]));
      double r = err_[i] / sc;
      acc += r * r;
    }
    return std::sqrt(acc / dim_);
  }

  // Dense output of component i at fraction theta of the last step.
  double dense(std::size_t i, double h, double theta) const {
    double t2 = theta * theta, t3 = t2 * theta, t4 = t3 * theta;
    double acc = 0.0;
    for (std::size_t s = 0; s < 7; ++s) {
      const auto& p = dp::P[s];
      acc += k_[s][i] * (p[0] * theta + p[1] * t2 + p[2] * t3 + p[3] * t4);
    }
    return y0_[i] + h * acc;
  }

  double dense_sbf(double h, double theta) const {
    return domain_.signed_boundary_function({dense(0, h, theta), dense(1, h, theta)});
  }

  void add_dense_nodes(std::vector<RayState>& nodes, double sigma, double h, double theta_end) const {
    double span = h * theta_end;
    int pieces = int(std::ceil(span / opts_.node_spacing));
    for (int p = 1; p < pieces; ++p) {
      double th = theta_end * p / pieces;
      nodes.push_back({{dense(0, h, th), dense(1, h, th)}, dense(2, h, th), dense(3, h, th), sigma + h * th});
    }
  }

  // First step of a ray launched from the boundary: find where it is inside, then the exit.
  bool bracket_from_boundary(double h, double& lo, double& hi) const {
    constexpr int kSamples = 64;
    int k = 1;
    while (k <= kSamples && dense_sbf(h, double(k) / kSamples) >= 0.0) ++k;
    if (k > kSamples) return false;
    int m = k + 1;
    while (m <= kSamples && dense_sbf(h, double(m) / kSamples) < 0.0) ++m;
    if (m > kSamples) {
      lo = double(kSamples - 1) / kSamples;
      hi = 1.0;
    } else {
      lo = double(m - 1) / kSamples;
      hi = double(m) / kSamples;
    }
    return true;
  }

  // Locate the boundary crossing inside the last step and land on it with exact RK sub-steps.
  void finish(Result& res, double sigma, double h, double lo, double hi) {
    for (int it = 0; it < 200 && (hi - lo) * h > 1e-13; ++it) {
      double mid = 0.5 * (lo + hi);
      if (dense_sbf(h, mid) < 0.0)
        lo = mid;
      else
        hi = mid;
    }
    double hs = 0.5 * (lo + hi) * h;
    step(hs);
    for (int it = 0; it < 8; ++it) {
      Vec2 x{y1_[0], y1_[1]};
      double g = domain_.signed_boundary_function(x);
      if (std::abs(g) < 1e-14) break;
      double dg = dot(domain_.signed_boundary_gradient(x), unit_from_angle(y1_[2]));
      if (std::abs(dg) < 1e-12) break;
      hs -= g / dg;
      step(hs);
    }
    res.final = state_of(y1_, sigma + hs);
    res.nodes.push_back(res.final);
    res.integrals.assign(y1_.begin() + 4, y1_.end());
    Vec2 x{y1_[0], y1_[1]};
    res.exit_cosine = dot(domain_.inward_normal_at(x), unit_from_angle(y1_[2]));
  }

  const RefractionField& field_;
  const Domain& domain_;
  const TracerOptions& opts_;
  std::span<const ScalarField> integrands_;
  std::size_t dim_;
  std::array<std::vector<double>, 7> k_;
  std::vector<double> y0_, y1_, tmp_, err_;
  double n_ref_ = 1.0;
};

void check_exit(double exit_cosine, const TracerOptions& opts) {
  if (std::abs(exit_cosine) < opts.min_exit_cosine)
    throw NumericalError(ErrorKind::TangentExit, "exit cosine " + std::to_string(exit_cosine));
}

}  // namespace

GeodesicPath trace_forward(Vec2 x, double phi, const RefractionField& field, const Domain& domain,
                           const TracerOptions& opts, std::span<const ScalarField> integrands) {
  RayIntegrator integ(field, domain, opts, integrands);
  bool on_boundary = std::abs(domain.signed_boundary_function(x)) <= 1e-12;
  auto r = integ.run(x, phi, on_boundary);
  check_exit(r.exit_cosine, opts);
  GeodesicPath path;
  path.nodes = std::move(r.nodes);
  path.entry_s = on_boundary ? domain.boundary().locate(x) : std::numeric_limits<double>::quiet_NaN();
  path.entry_cosine = on_boundary ? dot(domain.inward_normal_at(x), unit_from_angle(phi)) : 0.0;
  path.exit_s = domain.boundary().locate(r.final.x);
  path.exit_phi = wrap_angle(r.final.phi);
  path.exit_cosine = r.exit_cosine;
  path.status = on_boundary ? PathStatus::boundary_to_boundary : PathStatus::interior_terminal;
  path.line_integrals = std::move(r.integrals);
  path.accepted_steps = r.accepted;
  path.rejected_steps = r.rejected;
  return path;
}

GeodesicPath trace_backward(Vec2 x, double phi, const RefractionField& field, const Domain& domain,
                            const TracerOptions& opts, std::span<const ScalarField> integrands) {
  if (!domain.inside(x)) throw NumericalError(ErrorKind::InvalidArgument, "trace_backward needs an interior point");
  RayIntegrator integ(field, domain, opts, integrands);
  auto r = integ.run(x, phi + kPi, false);
  check_exit(r.exit_cosine, opts);
  const RayState& last = r.final;
  GeodesicPath path;
  path.nodes.reserve(r.nodes.size());
  for (auto it = r.nodes.rbegin(); it != r.nodes.rend(); ++it)
    path.nodes.push_back({it->x, it->phi - kPi, last.tau - it->tau, last.sigma - it->sigma});
  // Pin the end values exactly.
  path.nodes.front().tau = 0.0;
  path.nodes.front().sigma = 0.0;
  path.nodes.back().x = x;
  path.nodes.back().phi = phi;
  path.entry_s = domain.boundary().locate(last.x);
  path.entry_cosine = -r.exit_cosine;
  path.status = PathStatus::interior_terminal;
  path.line_integrals = std::move(r.integrals);
  path.accepted_steps = r.accepted;
  path.rejected_steps = r.rejected;
  return path;
}

GeodesicPath trace_chord(double s_entry, double phi, const RefractionField& field, const Domain& domain,
                         const TracerOptions& opts, std::span<const ScalarField> integrands) {
  if (domain.classify_direction(s_entry, phi) != DirectionClass::incoming)
    throw NumericalError(ErrorKind::InvalidArgument, "trace_chord needs an incoming direction");
  const auto& b = domain.boundary();
  Vec2 y = b.point(s_entry);
  RayIntegrator integ(field, domain, opts, integrands);
  auto r = integ.run(y, phi, true);
  check_exit(r.exit_cosine, opts);
  GeodesicPath path;
  path.nodes = std::move(r.nodes);
  double L = b.total_length();
  path.entry_s = std::fmod(std::fmod(s_entry, L) + L, L);
  path.entry_cosine = domain.conormal_cosine(s_entry, phi);
  path.exit_s = b.locate(r.final.x);
  path.exit_phi = wrap_angle(r.final.phi);
  path.exit_cosine = r.exit_cosine;
  path.status = PathStatus::boundary_to_boundary;
  path.line_integrals = std::move(r.integrals);
  path.accepted_steps = r.accepted;
  path.rejected_steps = r.rejected;
  return path;
}

NonTrappingReport non_trapping_check(const RefractionField& field, const Domain& domain, int n_samples,
                                     std::uint64_t seed) {
  NonTrappingReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  TracerOptions opts;
  opts.record_nodes = false;
  opts.min_exit_cosine = 0.0;
  const auto bb = domain.bounds();
  for (int i = 0; i < n_samples; ++i) {
    Vec2 x;
    do {
      x = {bb.lo.x + (bb.hi.x - bb.lo.x) * unif(rng), bb.lo.y + (bb.hi.y - bb.lo.y) * unif(rng)};
    } while (!domain.inside(x));
    double phi = kTwoPi * unif(rng);
    ++rep.samples;
    for (double dir : {phi, phi + kPi}) {
      try {
        GeodesicPath p = trace_forward(x, dir, field, domain, opts);
        double c = std::abs(p.exit_cosine);
        rep.worst_exit_cosine = std::min(rep.worst_exit_cosine, c);
        if (c < TracerOptions{}.min_exit_cosine) ++rep.tangent_exits;
        rep.max_path_length = std::max(rep.max_path_length, p.length());
      } catch (const NumericalError& e) {
        if (e.kind() != ErrorKind::Trapped) throw;
        ++rep.trapped;
      }
    }
  }
  rep.ok = rep.trapped == 0 && rep.tangent_exits == 0;
  return rep;
}

}  // namespace rigidity
