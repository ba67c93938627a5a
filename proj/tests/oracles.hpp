#pragma once

// Closed forms and brute-force references the library code is checked against.

#include <cmath>
#include <functional>
#include <random>

#include "rigidity/vec2.hpp"

namespace oracle {

using rigidity::Vec2;
constexpr double pi = 3.14159265358979323846;

// Length of a closed polar curve r(a) by the periodic trapezoid rule on n points.
inline double polar_length(const std::function<double(double)>& r, const std::function<double(double)>& dr, int n) {
  double h = 2.0 * pi / n, sum = 0.0;
  for (int k = 0; k < n; ++k) {
    double a = k * h;
    sum += std::hypot(r(a), dr(a));
  }
  return sum * h;
}

// Straight chord of the unit disc launched from the boundary point at angle s along phi.
inline double disc_chord_length(double s, double phi) {
  // |y + t theta| = 1 with |y| = 1: t = -2 <y, theta>.
  return -2.0 * (std::cos(s) * std::cos(phi) + std::sin(s) * std::sin(phi));
}

// Backward distance from interior x along -theta to the unit circle.
inline double disc_backward_distance(Vec2 x, double phi) {
  Vec2 t{std::cos(phi), std::sin(phi)};
  double b = x.x * t.x + x.y * t.y;
  double c = x.x * x.x + x.y * x.y - 1.0;
  return b + std::sqrt(b * b - c);
}

// Simpson's rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  double h = (b - a) / n, s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Classical RK4 for the ray equations of n^2 ds^2 in arc length, fixed step, with n and its
// gradient supplied as callables. Returns tau after integrating length L from (x, phi).
inline double rk4_travel_time(const std::function<double(Vec2)>& n, const std::function<Vec2(Vec2)>& grad, Vec2 x,
                              double phi, double L, int steps) {
  struct S {
    double x, y, p, t;
  };
  auto rhs = [&](const S& s) {
    Vec2 g = grad({s.x, s.y});
    double nv = n({s.x, s.y});
    return S{std::cos(s.p), std::sin(s.p), (-std::sin(s.p) * g.x + std::cos(s.p) * g.y) / nv, nv};
  };
  S s{x.x, x.y, phi, 0.0};
  double h = L / steps;
  for (int k = 0; k < steps; ++k) {
    S k1 = rhs(s);
    S k2 = rhs({s.x + 0.5 * h * k1.x, s.y + 0.5 * h * k1.y, s.p + 0.5 * h * k1.p, 0});
    S k3 = rhs({s.x + 0.5 * h * k2.x, s.y + 0.5 * h * k2.y, s.p + 0.5 * h * k2.p, 0});
    S k4 = rhs({s.x + h * k3.x, s.y + h * k3.y, s.p + h * k3.p, 0});
    s.x += h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
    s.y += h / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y);
    s.p += h / 6 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p);
    s.t += h / 6 * (k1.t + 2 * k2.t + 2 * k3.t + k4.t);
  }
  return s.t;
}

inline std::mt19937_64 rng(std::uint64_t seed = 12345) { return std::mt19937_64(seed); }

}  // namespace oracle
