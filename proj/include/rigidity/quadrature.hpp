#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace rigidity {

struct GaussRule {
  std::vector<double> nodes;    // on (-1, 1), ascending
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on (-1, 1). Nodes by Newton iteration on the three-term recurrence.
GaussRule gauss_legendre(int n);

// Neumaier-compensated accumulator. Summation order is the caller's loop order, which keeps
// reductions reproducible bit-for-bit.
class CompensatedSum {
 public:
  void add(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> values);

}  // namespace rigidity
