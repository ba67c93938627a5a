#pragma once

#include <string>
#include <vector>

#include "rigidity/vec2.hpp"

namespace rigidity {

struct ValueGrad {
  double value = 0.0;
  Vec2 grad;
};

// Samples of a scalar on a uniform rectilinear grid, row-major with x fastest.
struct GridSamples {
  double x0 = 0.0, y0 = 0.0;
  double dx = 0.0, dy = 0.0;
  int nx = 0, ny = 0;
  std::vector<double> values;

  double at(int i, int j) const { return values[std::size_t(j) * nx + i]; }
};

// Parses "x,y,n" rows (optional header) into a uniform grid. Throws ConfigError on ragged or
// non-uniform input.
GridSamples read_grid_csv(const std::string& path);
GridSamples parse_grid_csv(const std::string& text);

// Tensor-product cubic B-spline interpolant with natural end conditions (C2 everywhere).
// Outside the knot box the nearest cell's polynomial is extended.
class CubicSplineGrid {
 public:
  explicit CubicSplineGrid(const GridSamples& samples);

  ValueGrad eval(Vec2 p) const;
  double x_min() const { return x0_; }
  double y_min() const { return y0_; }
  double x_max() const { return x0_ + dx_ * (nx_ - 1); }
  double y_max() const { return y0_ + dy_ * (ny_ - 1); }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }

 private:
  double coef(int i, int j) const { return coef_[std::size_t(j) * (nx_ + 2) + i]; }

  double x0_, y0_, dx_, dy_;
  int nx_, ny_;
  std::vector<double> coef_;  // (nx+2) x (ny+2), index shifted by one
};

}  // namespace rigidity
