#pragma once

// Analytic closed curves and their equispaced parameter grids.

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "kreinlab/error.hpp"
#include "kreinlab/linalg.hpp"

namespace kreinlab::geometry {

enum class CurveKind { circle, ellipse, kite, star };

using Vec2 = std::array<double, 2>;

struct CurveSpec {
  CurveKind kind = CurveKind::circle;
  // circle: a = radius; ellipse: semi-axes a, b; star: a = amplitude, b = wavenumber.
  double a = 1.0;
  double b = 1.0;

  static CurveSpec circle(double radius) { return {CurveKind::circle, radius, radius}; }
  static CurveSpec ellipse(double a, double b) { return {CurveKind::ellipse, a, b}; }
  static CurveSpec kite() { return {CurveKind::kite, 1.0, 1.0}; }
  static CurveSpec star(double amplitude, int wavenumber) {
    return {CurveKind::star, amplitude, double(wavenumber)};
  }

  void validate() const {
    auto bad = [](const std::string& m) { throw Error(Errc::spec_invalid, m); };
    switch (kind) {
      case CurveKind::circle:
        if (!(a > 0.0)) bad("circle radius must be positive");
        break;
      case CurveKind::ellipse:
        if (!(a > 0.0 && b > 0.0)) bad("ellipse semi-axes must be positive");
        break;
      case CurveKind::kite:
        break;
      case CurveKind::star:
        if (!(a > 0.0 && a < 1.0)) bad("star amplitude must lie in (0, 1)");
        if (!(b >= 1.0 && b == std::floor(b))) bad("star wavenumber must be a positive integer");
        break;
    }
  }

  std::string name() const {
    switch (kind) {
      case CurveKind::circle: return "circle";
      case CurveKind::ellipse: return "ellipse";
      case CurveKind::kite: return "kite";
      case CurveKind::star: return "star";
    }
    return "unknown";
  }

  // Position and first two parameter derivatives at t.
  void eval(double t, Vec2& x, Vec2& d1, Vec2& d2) const {
    const double c = std::cos(t), s = std::sin(t);
    switch (kind) {
      case CurveKind::circle:
      case CurveKind::ellipse:
        x = {a * c, b * s};
        d1 = {-a * s, b * c};
        d2 = {-a * c, -b * s};
        return;
      case CurveKind::kite: {
        const double c2 = std::cos(2 * t), s2 = std::sin(2 * t);
        x = {c + 0.65 * c2 - 0.65, 1.5 * s};
        d1 = {-s - 1.3 * s2, 1.5 * c};
        d2 = {-c - 2.6 * c2, -1.5 * s};
        return;
      }
      case CurveKind::star: {
        const double m = b;
        const double r = 1.0 + a * std::cos(m * t);
        const double r1 = -a * m * std::sin(m * t);
        const double r2 = -a * m * m * std::cos(m * t);
        x = {r * c, r * s};
        d1 = {r1 * c - r * s, r1 * s + r * c};
        d2 = {r2 * c - 2 * r1 * s - r * c, r2 * s + 2 * r1 * c - r * s};
        return;
      }
    }
  }

  bool operator==(const CurveSpec&) const = default;
};

struct BoundaryGrid {
  CurveSpec curve;
  int n = 0;
  RVec t;
  RMat x;       // n x 2 points
  RMat dx;      // n x 2 first derivative
  RMat ddx;     // n x 2 second derivative
  RMat normal;  // n x 2 outward unit normals
  RVec speed;
  RVec weight;  // trapezoid weights 2 pi / n
  RVec curvature;
  std::uint64_t token = 0;
  // Smooth curves are quasi-convex; stored for reference only.
  bool quasi_convex = true;

  // Boundary measure weights w_j |x'(t_j)|.
  RVec measure() const { return weight.cwiseProduct(speed); }
  double length() const { return measure().sum(); }
  double spacing() const { return measure().maxCoeff(); }
};

inline std::uint64_t next_grid_token() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

inline BoundaryGrid make_grid(const CurveSpec& spec, int n) {
  if (n < 16 || n % 2 != 0)
    throw Error(Errc::bad_node_count, "node count must be even and at least 16, got " + std::to_string(n));
  spec.validate();
  BoundaryGrid g;
  g.curve = spec;
  g.n = n;
  g.t.resize(n);
  g.x.resize(n, 2);
  g.dx.resize(n, 2);
  g.ddx.resize(n, 2);
  g.normal.resize(n, 2);
  g.speed.resize(n);
  g.weight = RVec::Constant(n, 2.0 * pi / n);
  g.curvature.resize(n);
  for (int j = 0; j < n; ++j) {
    const double t = 2.0 * pi * j / n;
    Vec2 p{}, d1{}, d2{};
    spec.eval(t, p, d1, d2);
    const double sp = std::hypot(d1[0], d1[1]);
    g.t[j] = t;
    g.x.row(j) << p[0], p[1];
    g.dx.row(j) << d1[0], d1[1];
    g.ddx.row(j) << d2[0], d2[1];
    g.speed[j] = sp;
    g.normal.row(j) << d1[1] / sp, -d1[0] / sp;
    g.curvature[j] = (d1[0] * d2[1] - d1[1] * d2[0]) / (sp * sp * sp);
  }
  g.token = next_grid_token();
  return g;
}

// Distance from p to the nearest grid node.
inline double node_distance(const BoundaryGrid& g, double px, double py) {
  double best = INFINITY;
  for (int j = 0; j < g.n; ++j) best = std::min(best, std::hypot(px - g.x(j, 0), py - g.x(j, 1)));
  return best;
}

}  // namespace kreinlab::geometry
