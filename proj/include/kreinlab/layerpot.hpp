#pragma once

// Nystrom discretization of the single layer trace V_z and the adjoint double
// layer K#_z on analytic curves (logarithmic product quadrature), plus
// off-boundary evaluation of single layer potentials.

#include <cmath>
#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

#include "kreinlab/geometry.hpp"
#include "kreinlab/linalg.hpp"
#include "kreinlab/parallel.hpp"
#include "kreinlab/specfun.hpp"

namespace kreinlab::layerpot {

using geometry::BoundaryGrid;

enum class Role { V, Ksharp, DtN, NtD, L, MD, generic };

constexpr std::string_view role_name(Role r) noexcept {
  switch (r) {
    case Role::V: return "V";
    case Role::Ksharp: return "Ksharp";
    case Role::DtN: return "DtN";
    case Role::NtD: return "NtD";
    case Role::L: return "L";
    case Role::MD: return "MD";
    case Role::generic: return "generic";
  }
  return "generic";
}

struct BoundaryOperator {
  CMat matrix;
  Role role = Role::generic;
  cplx z = 0.0;
  std::uint64_t token = 0;
  // Condition estimate of the linear system behind the matrix, when one was solved.
  double condition = 0.0;
};

// Coefficient of (1/2)I in the interior Neumann trace of S_z. Fixed by the
// uniform density on the unit circle, where S_0 1 is constant inside.
inline constexpr int jump_sign = +1;

// Product weights for int_0^{2pi} ln(4 sin^2((t - s)/2)) f(s) ds on N = 2n
// equispaced nodes; entry k belongs to t - s = k pi / n.
inline RVec log_weights(int nodes) {
  const int n = nodes / 2;
  RVec r(nodes);
  for (int k = 0; k < nodes; ++k) {
    double s = 0.0;
    for (int m = 1; m < n; ++m) s += std::cos(m * k * pi / n) / m;
    r[k] = -2.0 * pi / n * s - pi / (double(n) * n) * ((k % 2 == 0) ? 1.0 : -1.0);
  }
  return r;
}

inline BoundaryOperator assemble_single_layer_trace(const BoundaryGrid& g, cplx z) {
  const int N = g.n;
  const RVec rw = log_weights(N);
  const double h = 2.0 * pi / N;
  const cplx k = specfun::sqrt_branch(z);
  const bool laplace = (z == 0.0);
  CMat v(N, N);
  parallel_for(N, [&](int i) {
    for (int j = 0; j < N; ++j) {
      const double sp = g.speed[j];
      cplx m1, m2;
      if (i == j) {
        m1 = -sp / (4.0 * pi);
        if (laplace)
          m2 = -std::log(sp * sp) * sp / (4.0 * pi);
        else
          m2 = (0.25 * I - specfun::euler_gamma / (2.0 * pi) - std::log(k * sp / 2.0) / (2.0 * pi)) * sp;
      } else {
        const double dx = g.x(i, 0) - g.x(j, 0), dy = g.x(i, 1) - g.x(j, 1);
        const double r = std::hypot(dx, dy);
        const double sn = std::sin(0.5 * (g.t[i] - g.t[j]));
        const double lg = std::log(4.0 * sn * sn);
        cplx m;
        if (laplace) {
          m = -std::log(r * r) * sp / (4.0 * pi);
          m1 = -sp / (4.0 * pi);
        } else {
          const auto b = specfun::bessel01(k * r);
          m = 0.25 * I * b.h0 * sp;
          m1 = -b.j0 * sp / (4.0 * pi);
        }
        m2 = m - m1 * lg;
      }
      v(i, j) = rw[std::abs(i - j)] * m1 + h * m2;
    }
  });
  return {std::move(v), Role::V, z, g.token};
}

inline BoundaryOperator assemble_adjoint_double_layer(const BoundaryGrid& g, cplx z) {
  const int N = g.n;
  const double h = 2.0 * pi / N;
  const cplx k = specfun::sqrt_branch(z);
  const bool laplace = (z == 0.0);
  const RVec rw = laplace ? RVec() : log_weights(N);
  CMat kmat(N, N);
  parallel_for(N, [&](int i) {
    for (int j = 0; j < N; ++j) {
      const double sp = g.speed[j];
      if (i == j) {
        kmat(i, j) = h * (-g.curvature[i] * sp / (4.0 * pi));
        continue;
      }
      const double dx = g.x(i, 0) - g.x(j, 0), dy = g.x(i, 1) - g.x(j, 1);
      const double r = std::hypot(dx, dy);
      const double d = g.normal(i, 0) * dx + g.normal(i, 1) * dy;
      if (laplace) {
        kmat(i, j) = h * (-d / (r * r) * sp / (2.0 * pi));
        continue;
      }
      const auto b = specfun::bessel01(k * r);
      const cplx full = -0.25 * I * k * b.h1 * d / r * sp;
      const cplx l1 = k / (4.0 * pi) * b.j1 * d / r * sp;
      const double sn = std::sin(0.5 * (g.t[i] - g.t[j]));
      const cplx l2 = full - l1 * std::log(4.0 * sn * sn);
      kmat(i, j) = rw[std::abs(i - j)] * l1 + h * l2;
    }
  });
  return {std::move(kmat), Role::Ksharp, z, g.token};
}

// Interior Neumann trace of S_z g: (jump_sign/2) g + K#_z g.
inline BoundaryOperator neumann_trace_of_single_layer(const BoundaryGrid& g, cplx z) {
  auto k = assemble_adjoint_double_layer(g, z);
  k.matrix.diagonal().array() += 0.5 * jump_sign;
  k.role = Role::generic;
  return k;
}

// Trigonometric interpolant of nodal values on a grid refined by an integer factor.
inline CVec trig_refine(const CVec& values, int factor) {
  const int N = int(values.size());
  if (factor == 1) return values;
  const int n = N / 2;
  std::vector<cplx> roots(N);
  for (int m = 0; m < N; ++m) roots[m] = std::polar(1.0, 2.0 * pi * m / N);
  auto root = [&](long e) { return roots[((e % N) + N) % N]; };
  std::vector<cplx> coef(N);
  for (int k = -n; k < n; ++k) {
    cplx s = 0.0;
    for (int j = 0; j < N; ++j) s += values[j] * root(-long(k) * j);
    coef[k + n] = s / double(N);
  }
  // The Nyquist mode enters as a cosine so real data stay real.
  const cplx nyq = coef[0];
  CVec out(long(N) * factor);
  std::vector<cplx> shifted(N);
  for (int r = 0; r < factor; ++r) {
    for (int k = -n + 1; k < n; ++k)
      shifted[k + n] = coef[k + n] * std::polar(1.0, 2.0 * pi * k * r / (double(N) * factor));
    for (int j = 0; j < N; ++j) {
      cplx s = 0.0;
      for (int k = -n + 1; k < n; ++k) s += shifted[k + n] * root(long(k) * j);
      const double tt = 2.0 * pi * (double(j) / N + double(r) / (double(N) * factor));
      out[long(j) * factor + r] = s + nyq * std::cos(n * tt);
    }
  }
  return out;
}

struct PotentialEval {
  CVec value;
  CMat gradient;                // m x 2
  std::vector<bool> too_close;  // distance below 5 grid spacings
};

// Plain quadrature sum of E_2(z; p - y) g(y) over the grid for each target p.
// Targets closer than 5 spacings are flagged; for them the density is refined
// by trigonometric interpolation until the spacing is below a fifth of the distance.
inline PotentialEval evaluate_potential(const BoundaryGrid& g, const CVec& density, cplx z,
                                        const RMat& targets, int max_nodes = 1 << 19) {
  const long m = targets.rows();
  PotentialEval out;
  out.value = CVec::Zero(m);
  out.gradient = CMat::Zero(m, 2);
  out.too_close.assign(m, false);
  const cplx k = specfun::sqrt_branch(z);
  const double h = g.spacing();
  std::map<int, std::pair<BoundaryGrid, CVec>> refined;
  for (long p = 0; p < m; ++p) {
    const double px = targets(p, 0), py = targets(p, 1);
    const double dist = geometry::node_distance(g, px, py);
    int factor = 1;
    if (dist < 5.0 * h) {
      out.too_close[p] = true;
      factor = int(std::ceil(5.0 * h / std::max(dist, 1e-300)));
      factor = std::max(1, std::min(factor, max_nodes / g.n));
    }
    const BoundaryGrid* grid = &g;
    const CVec* dens = &density;
    if (factor > 1) {
      auto it = refined.find(factor);
      if (it == refined.end())
        it = refined.emplace(factor, std::make_pair(geometry::make_grid(g.curve, g.n * factor),
                                                    trig_refine(density, factor))).first;
      grid = &it->second.first;
      dens = &it->second.second;
    }
    const RVec meas = grid->measure();
    cplx u = 0.0, gx = 0.0, gy = 0.0;
    for (int j = 0; j < grid->n; ++j) {
      const double dx = px - grid->x(j, 0), dy = py - grid->x(j, 1);
      const double r = std::hypot(dx, dy);
      cplx e, de;
      if (z == 0.0) {
        e = -std::log(r) / (2.0 * pi);
        de = -1.0 / (2.0 * pi * r);
      } else {
        const auto b = specfun::bessel01(k * r);
        e = 0.25 * I * b.h0;
        de = -0.25 * I * k * b.h1;
      }
      const cplx c = (*dens)[j] * meas[j];
      u += e * c;
      gx += de * dx / r * c;
      gy += de * dy / r * c;
    }
    out.value[p] = u;
    out.gradient(p, 0) = gx;
    out.gradient(p, 1) = gy;
  }
  return out;
}

}  // namespace kreinlab::layerpot
