#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "kreinlab/error.hpp"

namespace kreinlab {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

namespace la {

// Boundary inner products are <a, b> = sum_j w_j a_j conj(b_j) with w_j > 0.
inline cplx pairing(const CVec& a, const CVec& b, const RVec& w) {
  cplx s = 0.0;
  for (Eigen::Index j = 0; j < a.size(); ++j) s += w[j] * a[j] * std::conj(b[j]);
  return s;
}

inline double norm(const CVec& a, const RVec& w) {
  return std::sqrt(std::abs(pairing(a, a, w)));
}

// W^{1/2} A W^{-1/2}: the matrix in an orthonormal frame of the weighted space.
inline CMat symmetrize(const CMat& a, const RVec& w) {
  const RVec s = w.cwiseSqrt();
  CMat out = a;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out(i, j) *= s[i] / s[j];
  return out;
}

// Adjoint with respect to the weighted pairing: W^{-1} A^H W.
inline CMat adjoint(const CMat& a, const RVec& w) {
  CMat out = a.adjoint();
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) *= w[j] / w[i];
  return out;
}

inline double op_norm(const CMat& a, const RVec& w) {
  if (a.size() == 0) return 0.0;
  const CMat s = symmetrize(a, w);
  const CMat g = s.adjoint() * s;
  Eigen::SelfAdjointEigenSolver<CMat> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

inline double op_norm(const CMat& a) { return op_norm(a, RVec::Ones(a.rows())); }

// Eigenvalues (ascending) of (A + A^*)/2 in the weighted space.
inline RVec hermitian_part_eigs(const CMat& a, const RVec& w) {
  const CMat s = symmetrize(a, w);
  const CMat h = 0.5 * (s + s.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Eigenvalues (ascending) of (A - A^*)/(2i) in the weighted space.
inline RVec imag_part_eigs(const CMat& a, const RVec& w) {
  const CMat s = symmetrize(a, w);
  const CMat h = (s - s.adjoint()) / (2.0 * I);
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double hermitian_defect(const CMat& a, const RVec& w) {
  return op_norm(a - adjoint(a, w), w);
}

// LU solve that refuses systems whose reciprocal condition estimate is below rcond_min.
inline CMat solve_checked(const CMat& a, const CMat& b, Errc code, const std::string& what,
                          double rcond_min = 1e-13) {
  Eigen::PartialPivLU<CMat> lu(a);
  const double rc = lu.rcond();
  if (!(rc > rcond_min)) throw Error(code, what + " (rcond " + std::to_string(rc) + ")");
  return lu.solve(b);
}

inline CMat inverse_checked(const CMat& a, Errc code, const std::string& what,
                            double rcond_min = 1e-13) {
  return solve_checked(a, CMat::Identity(a.rows(), a.cols()), code, what, rcond_min);
}

inline double condition_number(const CMat& a) {
  Eigen::PartialPivLU<CMat> lu(a);
  const double rc = lu.rcond();
  return rc > 0.0 ? 1.0 / rc : INFINITY;
}

inline double smallest_singular_value(const CMat& a) {
  Eigen::JacobiSVD<CMat> svd(a);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

// Dirichlet and Neumann traces (columns) of a basis of w-harmonic fields.
struct HarmonicTraces {
  CMat dir;
  CMat neu;
};

struct Quadrature {
  std::vector<double> x;
  std::vector<double> w;
};

// n-point Gauss-Legendre rule on [a, b].
inline Quadrature gauss_legendre(int n, double a = -1.0, double b = 1.0) {
  Quadrature q;
  q.x.resize(n);
  q.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double wt = 2.0 / ((1.0 - x * x) * dp * dp);
    const double h = 0.5 * (b - a), c = 0.5 * (b + a);
    q.x[i] = c - h * x;
    q.x[n - 1 - i] = c + h * x;
    q.w[i] = q.w[n - 1 - i] = h * wt;
  }
  return q;
}

}  // namespace la

using la::HarmonicTraces;

}  // namespace kreinlab
