#pragma once

#include <string>
#include <vector>

#include "rigidity/hodograph.hpp"

namespace rigidity {

// n = n0 + sum_k c_k b_k with every b_k vanishing on the boundary.
class ModelParameterization {
 public:
  // Throws InvalidArgument if some basis element does not vanish on the boundary.
  ModelParameterization(ScalarField base, std::vector<ScalarField> basis, std::vector<std::string> names,
                        const Domain& domain);

  // b_k = (1 - |x|^2) |x|^(2(k-1)), k = 1..count (unit disc).
  static ModelParameterization radial(ScalarField base, int count, const Domain& domain);
  // Boundary-cutoff Gaussian bumps of unit amplitude.
  static ModelParameterization bumps(ScalarField base, const std::vector<Bump>& shapes, const Domain& domain);

  std::size_t size() const { return basis_.size(); }
  const ScalarField& base() const { return base_; }
  const std::vector<ScalarField>& basis() const { return basis_; }
  const std::vector<std::string>& names() const { return names_; }

  ScalarField field(const std::vector<double>& coefficients) const;
  // Throws NonPositive.
  RefractionField medium(const std::vector<double>& coefficients, const Domain& domain) const;

 private:
  ScalarField base_;
  std::vector<ScalarField> basis_;
  std::vector<std::string> names_;
};

// One boundary-to-boundary datum: the chord from s_entry to s_exit near launch angle phi.
struct TwoPointDatum {
  double s_entry = 0.0;
  double s_exit = 0.0;
  double phi = 0.0;
  double T = 0.0;
};

struct TomographyProblem {
  Domain domain;
  ModelParameterization param;
  HodographTable observed;
  std::vector<TwoPointDatum> data;  // from the included cells of observed
  double lambda_reg = 1e-8;
  TracerOptions tracer;
};

// Observed hodograph of the truth on an n_s x n_phi grid, with the two-point data it defines.
TomographyProblem make_problem(const Domain& domain, ModelParameterization param, const RefractionField& truth,
                               int n_s, int n_phi, Execution exec = Execution::parallel);

// Hodograph of n0 + sum c_k b_k on the observed grid.
HodographTable forward_model(const TomographyProblem& problem, const std::vector<double>& coefficients,
                             Execution exec = Execution::parallel);

struct TwoPointModel {
  std::vector<double> T;         // one per datum
  std::vector<double> jacobian;  // rows x params, row-major: integral of b_k along the chord
  std::vector<double> launch_phi;
};

// Re-shoots every datum in the model; launch_guess (optional) warm-starts the shooting.
TwoPointModel two_point_forward(const TomographyProblem& problem, const std::vector<double>& coefficients,
                                Execution exec = Execution::parallel, const std::vector<double>* launch_guess = nullptr);

// max_k ||FD column k - J column k||_inf / ||J column k||_inf with forward differences of step delta.
std::vector<double> jacobian_fd_errors(const TomographyProblem& problem, const std::vector<double>& coefficients,
                                       double delta, Execution exec = Execution::parallel);

struct GaussNewtonResult {
  std::vector<double> coefficients;
  std::vector<double> residual_history;  // RMS residual, starting with the initial model
  std::vector<std::vector<double>> coefficient_history;
  int iterations = 0;
};

// Throws Diverged (residual grows on two consecutive iterations) or RankDeficient.
GaussNewtonResult gauss_newton_solve(const TomographyProblem& problem, int max_iter, double tol,
                                     std::vector<double> initial = {}, Execution exec = Execution::parallel);

}  // namespace rigidity
