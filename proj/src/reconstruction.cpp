#include "rigidity/reconstruction.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "rigidity/errors.hpp"
#include "rigidity/quadrature.hpp"

namespace rigidity {

ModelParameterization::ModelParameterization(ScalarField base, std::vector<ScalarField> basis,
                                             std::vector<std::string> names, const Domain& domain)
    : base_(std::move(base)), basis_(std::move(basis)), names_(std::move(names)) {
  if (basis_.empty()) throw NumericalError(ErrorKind::InvalidArgument, "empty basis");
  names_.resize(basis_.size());
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    if (names_[k].empty()) names_[k] = "b" + std::to_string(k + 1);
    if (!vanishes_on_boundary(basis_[k], domain))
      throw NumericalError(ErrorKind::InvalidArgument, "basis element " + names_[k] + " does not vanish on the boundary");
  }
}

ModelParameterization ModelParameterization::radial(ScalarField base, int count, const Domain& domain) {
  std::vector<ScalarField> basis;
  std::vector<std::string> names;
  for (int k = 1; k <= count; ++k) {
    std::vector<double> c(k + 1, 0.0);
    c[k - 1] = 1.0;
    c[k] = -1.0;
    basis.push_back(ScalarField::radial_polynomial(c));
    names.push_back("(1-r^2)r^" + std::to_string(2 * (k - 1)));
  }
  return ModelParameterization(std::move(base), std::move(basis), std::move(names), domain);
}

ModelParameterization ModelParameterization::bumps(ScalarField base, const std::vector<Bump>& shapes,
                                                   const Domain& domain) {
  std::vector<ScalarField> basis;
  std::vector<std::string> names;
  for (const Bump& b : shapes) {
    basis.push_back(gaussian_bumps({{1.0, b.center, b.sigma}}, &domain));
    names.push_back("bump(" + std::to_string(b.center.x) + "," + std::to_string(b.center.y) + ")");
  }
  return ModelParameterization(std::move(base), std::move(basis), std::move(names), domain);
}

ScalarField ModelParameterization::field(const std::vector<double>& c) const {
  if (c.size() != basis_.size()) throw NumericalError(ErrorKind::InvalidArgument, "coefficient count mismatch");
  std::vector<double> w{1.0};
  std::vector<ScalarField> terms{base_};
  for (std::size_t k = 0; k < c.size(); ++k) {
    w.push_back(c[k]);
    terms.push_back(basis_[k]);
  }
  return ScalarField::linear_combination(std::move(w), std::move(terms));
}

RefractionField ModelParameterization::medium(const std::vector<double>& c, const Domain& domain) const {
  return RefractionField::from_field(field(c), domain);
}

TomographyProblem make_problem(const Domain& domain, ModelParameterization param, const RefractionField& truth,
                               int n_s, int n_phi, Execution exec) {
  TomographyProblem p{domain, std::move(param), build_hodograph(truth, domain, n_s, n_phi, exec), {}, 1e-8, {}};
  const BoundaryGrid& g = p.observed.grid;
  for (int i = 0; i < g.n_s; ++i)
    for (int j = 0; j < g.n_phi; ++j) {
      std::size_t k = g.index(i, j);
      if (!g.mask[k]) continue;
      p.data.push_back({g.s(i), p.observed.exit_s[k], g.phi(j), p.observed.tau[k]});
    }
  return p;
}

HodographTable forward_model(const TomographyProblem& problem, const std::vector<double>& coefficients,
                             Execution exec) {
  RefractionField n = problem.param.medium(coefficients, problem.domain);
  return build_hodograph(n, problem.domain, problem.observed.grid, exec, problem.tracer);
}

TwoPointModel two_point_forward(const TomographyProblem& problem, const std::vector<double>& coefficients,
                                Execution exec, const std::vector<double>* launch_guess) {
  RefractionField n = problem.param.medium(coefficients, problem.domain);
  const std::size_t rows = problem.data.size(), cols = problem.param.size();
  TwoPointModel m;
  m.T.resize(rows);
  m.jacobian.resize(rows * cols);
  m.launch_phi.resize(rows);
  TracerOptions o = problem.tracer;
  o.record_nodes = false;
  std::span<const ScalarField> basis(problem.param.basis());
  parallel_for(exec, rows, [&](std::size_t r) {
    const TwoPointDatum& d = problem.data[r];
    double guess = launch_guess ? (*launch_guess)[r] : d.phi;
    GeodesicPath p = shoot_two_point(d.s_entry, d.s_exit, guess, n, problem.domain, o, basis);
    m.T[r] = p.travel_time();
    m.launch_phi[r] = p.nodes.front().phi;
    for (std::size_t k = 0; k < cols; ++k) m.jacobian[r * cols + k] = p.line_integrals[k];
  });
  return m;
}

std::vector<double> jacobian_fd_errors(const TomographyProblem& problem, const std::vector<double>& c, double delta,
                                       Execution exec) {
  TwoPointModel m0 = two_point_forward(problem, c, exec);
  const std::size_t rows = problem.data.size(), cols = problem.param.size();
  std::vector<double> errs(cols);
  for (std::size_t k = 0; k < cols; ++k) {
    std::vector<double> ck = c;
    ck[k] += delta;
    TwoPointModel mk = two_point_forward(problem, ck, exec, &m0.launch_phi);
    double worst = 0.0, scale = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      double jk = m0.jacobian[r * cols + k];
      worst = std::max(worst, std::abs((mk.T[r] - m0.T[r]) / delta - jk));
      scale = std::max(scale, std::abs(jk));
    }
    errs[k] = worst / scale;
  }
  return errs;
}

namespace {

double rms(const std::vector<double>& r) {
  CompensatedSum acc;
  for (double v : r) acc.add(v * v);
  return std::sqrt(acc.value() / double(r.size()));
}

}  // namespace

GaussNewtonResult gauss_newton_solve(const TomographyProblem& problem, int max_iter, double tol,
                                     std::vector<double> initial, Execution exec) {
  const std::size_t rows = problem.data.size(), cols = problem.param.size();
  if (rows <= cols) throw NumericalError(ErrorKind::RankDeficient, "fewer data than parameters");
  if (initial.empty()) initial.assign(cols, 0.0);
  GaussNewtonResult res;
  res.coefficients = std::move(initial);

  std::vector<double> r(rows);
  auto evaluate = [&](const std::vector<double>* guess) {
    TwoPointModel m = two_point_forward(problem, res.coefficients, exec, guess);
    for (std::size_t i = 0; i < rows; ++i) r[i] = problem.data[i].T - m.T[i];
    return m;
  };
  TwoPointModel model = evaluate(nullptr);
  res.residual_history.push_back(rms(r));
  res.coefficient_history.push_back(res.coefficients);

  // Residuals below this are tracer noise.
  CompensatedSum mean_t;
  for (const auto& d : problem.data) mean_t.add(std::abs(d.T));
  const double floor = 10.0 * problem.tracer.rtol * mean_t.value() / double(rows);

  int growth = 0;
  for (int it = 0; it < max_iter && res.residual_history.back() > floor; ++it) {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> J(model.jacobian.data(),
                                                                                                 rows, cols);
    Eigen::Map<const Eigen::VectorXd> rv(r.data(), rows);
    Eigen::MatrixXd N = J.transpose() * J;
    N.diagonal().array() += problem.lambda_reg;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(N);
    // Pivot ratio rather than ldlt.rcond(), whose estimate misses exactly zero pivots.
    const Eigen::VectorXd piv = ldlt.vectorD();
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || !(piv.minCoeff() > 1e-15 * piv.maxCoeff()))
      throw NumericalError(ErrorKind::RankDeficient, "normal matrix is singular beyond the regularization");
    Eigen::VectorXd delta = ldlt.solve(J.transpose() * rv);
    for (std::size_t k = 0; k < cols; ++k) res.coefficients[k] += delta[k];

    std::vector<double> guess = model.launch_phi;
    model = evaluate(&guess);
    double prev = res.residual_history.back(), cur = rms(r);
    res.residual_history.push_back(cur);
    res.coefficient_history.push_back(res.coefficients);
    res.iterations = it + 1;
    growth = cur > prev ? growth + 1 : 0;
    if (growth >= 2)
      throw NumericalError(ErrorKind::Diverged, "residual grew on two consecutive Gauss-Newton iterations");
    if (cur <= floor || (cur <= prev && (prev - cur) < tol * prev)) break;
  }
  return res;
}

}  // namespace rigidity
