#pragma once

// Boundary value problems for -Delta - z on curve domains through the single
// layer ansatz, and the Dirichlet-to-Neumann / Neumann-to-Dirichlet maps.

#include <optional>
#include <string>

#include "kreinlab/geometry.hpp"
#include "kreinlab/layerpot.hpp"
#include "kreinlab/linalg.hpp"

namespace kreinlab::weyl {

using geometry::BoundaryGrid;
using layerpot::BoundaryOperator;
using layerpot::Role;

inline constexpr double max_condition = 1e12;

struct SpectralParameter {
  cplx z = 0.0;
  // Certified distances to the reference spectra, when known.
  std::optional<double> dirichlet_distance;
  std::optional<double> neumann_distance;

  SpectralParameter() = default;
  SpectralParameter(cplx value) : z(value) {}  // NOLINT(google-explicit-constructor)
  SpectralParameter(double value) : z(value) {}  // NOLINT(google-explicit-constructor)
};

// u = S_z density + constant; the constant is nonzero only for z = 0, where the
// density is normalized to zero mean.
struct LayerField {
  BoundaryGrid grid;
  cplx z = 0.0;
  CVec density;
  cplx constant = 0.0;
  CVec trace_d;  // gamma_D u on the nodes
  CVec trace_n;  // gamma_N u on the nodes
  double condition = 0.0;

  CVec values(const RMat& pts) const {
    return layerpot::evaluate_potential(grid, density, z, pts).value.array() + constant;
  }
  cplx value(double x, double y) const {
    RMat p(1, 2);
    p << x, y;
    return values(p)[0];
  }
  CMat gradients(const RMat& pts) const {
    return layerpot::evaluate_potential(grid, density, z, pts).gradient;
  }
  // (-Delta - z) u = 0 in the interior.
  cplx laplacian(double x, double y) const { return -z * value(x, y); }
};

namespace detail {

inline void check_condition(double cond, const std::string& what) {
  if (!(cond <= max_condition))
    throw Error(Errc::near_singular, what + " condition number " + std::to_string(cond) + " exceeds 1e12");
}

// Solution operator f -> (density, constant) of the Dirichlet problem. For
// z = 0 the zero-mean bordered system removes the capacity degeneracy.
struct DirichletSolver {
  CMat v;
  CMat trace_n;  // (jump/2) I + K#
  CMat density_map;
  RVec constant_map;  // row giving the constant, z = 0 only
  double condition = 0.0;

  DirichletSolver(const BoundaryGrid& g, cplx z) {
    v = layerpot::assemble_single_layer_trace(g, z).matrix;
    trace_n = layerpot::neumann_trace_of_single_layer(g, z).matrix;
    const int n = g.n;
    if (z == 0.0) {
      CMat b = CMat::Zero(n + 1, n + 1);
      b.topLeftCorner(n, n) = v;
      b.block(0, n, n, 1).setOnes();
      b.block(n, 0, 1, n) = g.measure().transpose().cast<cplx>();
      condition = la::condition_number(b);
      check_condition(condition, "bordered single layer system");
      const CMat inv = b.partialPivLu().inverse();
      density_map = inv.topLeftCorner(n, n);
      constant_map = inv.block(n, 0, 1, n).real().transpose();
    } else {
      condition = la::condition_number(v);
      check_condition(condition, "single layer trace");
      density_map = v.partialPivLu().inverse();
      constant_map = RVec::Zero(n);
    }
  }
};

}  // namespace detail

inline LayerField solve_dirichlet(const BoundaryGrid& g, const SpectralParameter& sp, const CVec& f) {
  if (sp.dirichlet_distance && *sp.dirichlet_distance == 0.0)
    throw Error(Errc::near_singular, "z lies on the Dirichlet spectrum");
  detail::DirichletSolver s(g, sp.z);
  LayerField u{g, sp.z, s.density_map * f, 0.0, CVec(), CVec(), s.condition};
  if (sp.z == 0.0) u.constant = (s.constant_map.transpose().cast<cplx>() * f)(0);
  u.trace_d = s.v * u.density + CVec::Constant(g.n, u.constant);
  u.trace_n = s.trace_n * u.density;
  return u;
}

inline LayerField solve_neumann(const BoundaryGrid& g, const SpectralParameter& sp, const CVec& data) {
  if (sp.z == 0.0) throw Error(Errc::near_singular, "z = 0 is a Neumann eigenvalue (constants)");
  if (sp.neumann_distance && *sp.neumann_distance == 0.0)
    throw Error(Errc::near_singular, "z lies on the Neumann spectrum");
  const CMat a = layerpot::neumann_trace_of_single_layer(g, sp.z).matrix;
  const double cond = la::condition_number(a);
  detail::check_condition(cond, "Neumann boundary integral operator");
  const CMat v = layerpot::assemble_single_layer_trace(g, sp.z).matrix;
  LayerField u{g, sp.z, a.partialPivLu().solve(data), 0.0, CVec(), CVec(), cond};
  u.trace_d = v * u.density;
  u.trace_n = a * u.density;
  return u;
}

// Dirichlet-to-Neumann map f -> -gamma_N u_f.
inline BoundaryOperator dtn(const BoundaryGrid& g, const SpectralParameter& sp) {
  if (sp.dirichlet_distance && *sp.dirichlet_distance == 0.0)
    throw Error(Errc::near_singular, "z lies on the Dirichlet spectrum");
  detail::DirichletSolver s(g, sp.z);
  BoundaryOperator op{-s.trace_n * s.density_map, Role::DtN, sp.z, g.token};
  op.condition = s.condition;
  return op;
}

// Neumann-to-Dirichlet map g -> gamma_D u with gamma_N u = g; equals -dtn^{-1}.
inline BoundaryOperator ntd(const BoundaryGrid& g, const SpectralParameter& sp) {
  if (sp.z == 0.0) throw Error(Errc::near_singular, "z = 0 is a Neumann eigenvalue (constants)");
  if (sp.neumann_distance && *sp.neumann_distance == 0.0)
    throw Error(Errc::near_singular, "z lies on the Neumann spectrum");
  const CMat a = layerpot::neumann_trace_of_single_layer(g, sp.z).matrix;
  const double cond = la::condition_number(a);
  detail::check_condition(cond, "Neumann boundary integral operator");
  const CMat v = layerpot::assemble_single_layer_trace(g, sp.z).matrix;
  // V A^{-1} = (A^{-T} V^T)^T
  const CMat m = a.transpose().partialPivLu().solve(v.transpose()).transpose();
  BoundaryOperator op{m, Role::NtD, sp.z, g.token};
  op.condition = cond;
  return op;
}

// W-orthonormal basis (columns) of the band-limited trigonometric polynomials
// e^{ikt}, |k| <= n/4, on the grid. Nystrom matrices are accurate on this
// subspace; the top of the spectrum carries aliasing that breaks exact symmetry.
inline CMat resolved_frame(const BoundaryGrid& g) {
  const int n = g.n, top = n / 4, m = 2 * top + 1;
  const RVec w = g.measure();
  CMat e(n, m);
  for (int j = 0; j < n; ++j)
    for (int k = -top; k <= top; ++k) e(j, k + top) = std::polar(std::sqrt(w[j]), k * g.t[j]);
  const Eigen::HouseholderQR<CMat> qr(e);
  const CMat q = qr.householderQ() * CMat::Identity(n, m);
  return w.cwiseSqrt().cwiseInverse().asDiagonal() * q;
}

// Q* W A Q for the resolved frame Q: the compression of A in the weighted inner product.
inline CMat compress(const BoundaryGrid& g, const CMat& frame, const CMat& a) {
  return frame.adjoint() * g.measure().asDiagonal() * a * frame;
}

// || compress(A)^* - compress(B) ||_2, i.e. the symmetry defect A^* = B on the resolved subspace.
inline double resolved_symmetry_defect(const BoundaryGrid& g, const CMat& a, const CMat& b) {
  const CMat q = resolved_frame(g);
  return la::op_norm(CMat(compress(g, q, a).adjoint() - compress(g, q, b)));
}

// Eigenvalues of the Hermitian part of compress(A).
inline RVec resolved_hermitian_part_eigs(const BoundaryGrid& g, const CMat& a) {
  const CMat c = compress(g, resolved_frame(g), a);
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (c + c.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Eigenvalues of Im compress(A) = (c - c^*) / 2i.
inline RVec resolved_imag_part_eigs(const BoundaryGrid& g, const CMat& a) {
  const CMat c = compress(g, resolved_frame(g), a);
  Eigen::SelfAdjointEigenSolver<CMat> es((c - c.adjoint()) / (2.0 * I), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace kreinlab::weyl
