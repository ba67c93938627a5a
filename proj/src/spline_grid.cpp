#include "rigidity/spline_grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "rigidity/errors.hpp"

namespace rigidity {

namespace {

// Coefficients c_{-1..n} of the uniform cubic B-spline interpolating f_0..f_{n-1} with zero
// second derivative at both ends: c_{i-1} + 4 c_i + c_{i+1} = 6 f_i.
std::vector<double> interpolate_1d(const std::vector<double>& f) {
  const int n = int(f.size());
  // With natural ends, c_{-1} = 2c_0 - c_1, so row 0 becomes 6c_0 = 6f_0 (likewise the last row).
  std::vector<double> c(n + 2, 0.0);
  std::vector<double> diag(n, 4.0), rhs(n);
  for (int i = 0; i < n; ++i) rhs[i] = 6.0 * f[i];
  diag[0] = 6.0;
  diag[n - 1] = 6.0;
  std::vector<double> lower(n, 1.0), upper(n, 1.0);
  upper[0] = 0.0;
  lower[n - 1] = 0.0;
  // Thomas algorithm.
  for (int i = 1; i < n; ++i) {
    double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (int i = n - 2; i >= 0; --i) x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
  for (int i = 0; i < n; ++i) c[i + 1] = x[i];
  c[0] = 2.0 * x[0] - x[1];
  c[n + 1] = 2.0 * x[n - 1] - x[n - 2];
  return c;
}

void basis(double t, double b[4], double db[4]) {
  double u = 1.0 - t;
  b[0] = u * u * u / 6.0;
  b[1] = (3.0 * t * t * t - 6.0 * t * t + 4.0) / 6.0;
  b[2] = (-3.0 * t * t * t + 3.0 * t * t + 3.0 * t + 1.0) / 6.0;
  b[3] = t * t * t / 6.0;
  db[0] = -0.5 * u * u;
  db[1] = 0.5 * (3.0 * t * t - 4.0 * t);
  db[2] = 0.5 * (-3.0 * t * t + 2.0 * t + 1.0);
  db[3] = 0.5 * t * t;
}

}  // namespace

GridSamples parse_grid_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::map<std::pair<double, double>, double> pts;
  std::vector<double> xs, ys;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x, y, v;
    if (!(row >> x >> y >> v)) {
      if (lineno == 1) continue;  // header
      throw ConfigError("grid csv: malformed row " + std::to_string(lineno));
    }
    pts[{y, x}] = v;
    xs.push_back(x);
    ys.push_back(y);
  }
  auto uniq = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }), v.end());
    return v;
  };
  xs = uniq(xs);
  ys = uniq(ys);
  if (xs.size() < 2 || ys.size() < 2) throw ConfigError("grid csv: need at least 2x2 samples");
  if (pts.size() != xs.size() * ys.size()) throw ConfigError("grid csv: samples do not form a full grid");
  GridSamples g;
  g.nx = int(xs.size());
  g.ny = int(ys.size());
  g.x0 = xs.front();
  g.y0 = ys.front();
  g.dx = (xs.back() - xs.front()) / (g.nx - 1);
  g.dy = (ys.back() - ys.front()) / (g.ny - 1);
  for (int i = 0; i < g.nx; ++i)
    if (std::abs(xs[i] - (g.x0 + i * g.dx)) > 1e-9 * (1.0 + std::abs(xs[i])))
      throw ConfigError("grid csv: x samples are not uniform");
  for (int j = 0; j < g.ny; ++j)
    if (std::abs(ys[j] - (g.y0 + j * g.dy)) > 1e-9 * (1.0 + std::abs(ys[j])))
      throw ConfigError("grid csv: y samples are not uniform");
  g.values.reserve(pts.size());
  for (auto& [key, v] : pts) g.values.push_back(v);  // ordered by (y, x): row-major, x fastest
  return g;
}

GridSamples read_grid_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open grid csv: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_grid_csv(ss.str());
}

CubicSplineGrid::CubicSplineGrid(const GridSamples& g)
    : x0_(g.x0), y0_(g.y0), dx_(g.dx), dy_(g.dy), nx_(g.nx), ny_(g.ny) {
  if (nx_ < 4 || ny_ < 4) throw NumericalError(ErrorKind::OutOfClass, "spline grid needs at least 4x4 knots");
  if (!(dx_ > 0.0) || !(dy_ > 0.0)) throw NumericalError(ErrorKind::OutOfClass, "spline grid spacing must be positive");
  if (g.values.size() != std::size_t(nx_) * ny_) throw NumericalError(ErrorKind::OutOfClass, "spline grid size mismatch");
  // Rows first: tmp has (nx+2) columns per original row.
  std::vector<double> tmp(std::size_t(nx_ + 2) * ny_);
  for (int j = 0; j < ny_; ++j) {
    std::vector<double> row(g.values.begin() + std::size_t(j) * nx_, g.values.begin() + std::size_t(j + 1) * nx_);
    auto c = interpolate_1d(row);
    std::copy(c.begin(), c.end(), tmp.begin() + std::size_t(j) * (nx_ + 2));
  }
  coef_.assign(std::size_t(nx_ + 2) * (ny_ + 2), 0.0);
  for (int i = 0; i < nx_ + 2; ++i) {
    std::vector<double> col(ny_);
    for (int j = 0; j < ny_; ++j) col[j] = tmp[std::size_t(j) * (nx_ + 2) + i];
    auto c = interpolate_1d(col);
    for (int j = 0; j < ny_ + 2; ++j) coef_[std::size_t(j) * (nx_ + 2) + i] = c[j];
  }
}

ValueGrad CubicSplineGrid::eval(Vec2 p) const {
  double u = (p.x - x0_) / dx_, v = (p.y - y0_) / dy_;
  int i = std::clamp(int(std::floor(u)), 0, nx_ - 2);
  int j = std::clamp(int(std::floor(v)), 0, ny_ - 2);
  double bu[4], dbu[4], bv[4], dbv[4];
  basis(u - i, bu, dbu);
  basis(v - j, bv, dbv);
  ValueGrad out;
  for (int b = 0; b < 4; ++b) {
    double rv = 0.0, rdu = 0.0;
    for (int a = 0; a < 4; ++a) {
      double c = coef(i + a, j + b);
      rv += bu[a] * c;
      rdu += dbu[a] * c;
    }
    out.value += bv[b] * rv;
    out.grad.x += bv[b] * rdu;
    out.grad.y += dbv[b] * rv;
  }
  out.grad.x /= dx_;
  out.grad.y /= dy_;
  return out;
}

}  // namespace rigidity
