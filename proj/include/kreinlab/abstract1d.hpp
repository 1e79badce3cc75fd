#pragma once

// Abstract extension theory for the minimal operator S = -d^2/dx^2 on (0, 1):
// deficiency spaces, the Donoghue-type Weyl function, the Krein formula linking
// the Friedrichs and Krein extensions, and the decompositions of dom(S*).

#include <array>
#include <vector>

#include "kreinlab/extensions.hpp"
#include "kreinlab/kreinformulas.hpp"
#include "kreinlab/oracles/interval.hpp"

namespace kreinlab::abstract {

using oracles::IntervalField;
using oracles::IntervalModel;

enum class Realization { friedrichs, krein };

class Abstract1D {
 public:
  Abstract1D() : model_(128) {
    for (int sign : {+1, -1}) {
      // -u'' = sign i u  =>  u = e^{+-kappa x}, kappa^2 = -sign i
      const cplx kappa = specfun::sqrt_branch(-double(sign) * I);
      std::array<IntervalField, 2> raw{IntervalField::exponential(kappa), IntervalField::exponential(-kappa)};
      CMat gram(2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) gram(i, j) = model_.inner(raw[j], raw[i]);
      auto& slot = sign > 0 ? plus_ : minus_;
      slot.raw = raw;
      slot.gram = gram;
      // Orthonormalize: e = raw * C with C = L^{-H} from gram = L L^H.
      const CMat c = gram.llt().matrixU().solve(CMat::Identity(2, 2));
      for (int j = 0; j < 2; ++j) slot.basis[j] = c(0, j) * raw[0] + c(1, j) * raw[1];
    }
  }

  struct Deficiency {
    std::array<IntervalField, 2> raw;
    CMat gram;
    std::array<IntervalField, 2> basis;  // orthonormal
  };

  const IntervalModel& model() const { return model_; }
  const Deficiency& plus() const { return plus_; }
  const Deficiency& minus() const { return minus_; }

  // Numerical rank of the Gram matrices of N_+ and N_-.
  std::pair<int, int> deficiency_indices() const {
    auto rank = [](const CMat& g) {
      Eigen::SelfAdjointEigenSolver<CMat> es(g, Eigen::EigenvaluesOnly);
      int r = 0;
      for (double v : es.eigenvalues()) r += v > 1e-12 * es.eigenvalues().maxCoeff();
      return r;
    };
    return {rank(plus_.gram), rank(minus_.gram)};
  }

  // max_j |(n_j, (S* - i) n_j)| over the raw N_+ basis.
  double deficiency_defect() const {
    double worst = 0.0;
    for (const auto& n : plus_.raw) worst = std::max(worst, std::abs(model_.inner(n, model_.apply_op(n, I))));
    return worst;
  }

  ext::Extension<IntervalModel> extension(Realization r) const {
    auto spec = r == Realization::friedrichs ? ext::ExtensionSpec::dirichlet() : ext::ExtensionSpec::krein();
    return ext::Extension<IntervalModel>(spec.at(0.0), model_);
  }

  IntervalField resolvent(Realization r, cplx z, const IntervalField& f) const {
    if (r == Realization::friedrichs) return model::dirichlet_resolvent(model_, z, f);
    return ext::direct_resolvent(extension(r), z, f);
  }

  // M(z) = z I + (1 + z^2) P_N (S~ - z)^{-1} P_N in the orthonormal N_+ basis.
  CMat donoghue_m(Realization r, cplx z) const {
    CMat m(2, 2);
    for (int j = 0; j < 2; ++j) {
      const auto u = resolvent(r, z, plus_.basis[j]);
      for (int i = 0; i < 2; ++i) m(i, j) = (i == j ? z : 0.0) + (1.0 + z * z) * model_.inner(u, plus_.basis[i]);
    }
    return m;
  }

  double donoghue_symmetry_defect(Realization r, cplx z) const {
    return la::op_norm(donoghue_m(r, z).adjoint() - donoghue_m(r, std::conj(z)));
  }

  // (S_K - z)^{-1} f - (S_F - z)^{-1} f against
  // (S_F - i)(S_F - z)^{-1} P [M_F(0) - M_F(z)]^{-1} P (S_F + i)(S_F - z)^{-1} f.
  double krein_formula_residual(cplx z, const std::vector<IntervalField>& tests) const {
    const CMat bracket = donoghue_m(Realization::friedrichs, 0.0) - donoghue_m(Realization::friedrichs, z);
    Eigen::PartialPivLU<CMat> lu(bracket);
    if (!(lu.rcond() > 1e-12)) throw Error(Errc::bracket_singular, "M(0) - M(z) is singular: z is a Krein eigenvalue");
    double worst = 0.0;
    for (const auto& f : tests) {
      const auto rf = resolvent(Realization::friedrichs, z, f);
      const auto lhs = resolvent(Realization::krein, z, f) - rf;
      const auto g = f + (z + I) * rf;
      CVec c(2);
      for (int i = 0; i < 2; ++i) c[i] = model_.inner(g, plus_.basis[i]);
      const CVec d = lu.solve(c);
      const auto h = d[0] * plus_.basis[0] + d[1] * plus_.basis[1];
      const auto rhs = h + (z - I) * resolvent(Realization::friedrichs, z, h);
      worst = std::max(worst, krein::relative_gap(model_, rhs, lhs));
    }
    return worst;
  }

  // Cayley transform (S~ + i)(S~ - i)^{-1} = I + 2i (S~ - i)^{-1} maps N_- into N_+:
  // returns max |(-d^2/dx^2 - i) C n| over the N_- basis at the sample points.
  double cayley_defect(Realization r) const {
    double worst = 0.0;
    for (const auto& n : minus_.raw) {
      const auto c = n + (2.0 * I) * resolvent(r, I, n);
      const auto res = model_.apply_op(c, I);
      for (double x : model_.quadrature().x) worst = std::max(worst, std::abs(res.value(x)));
    }
    return worst;
  }

 private:
  IntervalModel model_;
  Deficiency plus_, minus_;
};

inline std::vector<IntervalField> abstract_test_functions() {
  return {IntervalField::constant(1.0), IntervalField::polynomial({0.0, 1.0, -1.0}), IntervalField::sine(pi),
          IntervalField::exponential(1.0), IntervalField::cosine(3.0) + IntervalField::polynomial({0.0, 0.0, 0.0, 1.0})};
}

// ---------------------------------------------------------------------------
// Friedrichs and Krein domains

// Friedrichs resolvent from the closed form on H^1_0 by Galerkin projection onto
// x(1 - x) P_n(2x - 1), n < size; returns the L^2 distance to the Dirichlet resolvent.
inline double friedrichs_dirichlet_gap(cplx z, const IntervalField& f, int size = 24) {
  const IntervalModel model(128);
  const auto& q = model.quadrature();
  const int m = int(q.x.size());
  RMat phi(size, m), dphi(size, m);
  for (int k = 0; k < m; ++k) {
    const double x = q.x[k], t = 2.0 * x - 1.0;
    double p0 = 1.0, p1 = t, d0 = 0.0, d1 = 2.0;  // P_n(2x-1) and d/dx
    for (int n = 0; n < size; ++n) {
      double p, d;
      if (n == 0) {
        p = p0;
        d = d0;
      } else if (n == 1) {
        p = p1;
        d = d1;
      } else {
        p = ((2.0 * n - 1.0) * t * p1 - (n - 1.0) * p0) / n;
        d = ((2.0 * n - 1.0) * (2.0 * p1 + t * d1) - (n - 1.0) * d0) / n;
        p0 = p1;
        p1 = p;
        d0 = d1;
        d1 = d;
      }
      phi(n, k) = x * (1.0 - x) * p;
      dphi(n, k) = (1.0 - 2.0 * x) * p + x * (1.0 - x) * d;
    }
  }
  CMat a(size, size);
  CVec rhs(size);
  for (int i = 0; i < size; ++i) {
    cplx s = 0.0;
    for (int k = 0; k < m; ++k) s += q.w[k] * f.value(q.x[k]) * phi(i, k);
    rhs[i] = s;
    for (int j = 0; j < size; ++j) {
      double stiff = 0.0, mass = 0.0;
      for (int k = 0; k < m; ++k) {
        stiff += q.w[k] * dphi(i, k) * dphi(j, k);
        mass += q.w[k] * phi(i, k) * phi(j, k);
      }
      a(i, j) = stiff - z * mass;
    }
  }
  const CVec c = a.partialPivLu().solve(rhs);
  const auto exact = model::dirichlet_resolvent(model, z, f);
  double err = 0.0, norm = 0.0;
  for (int k = 0; k < m; ++k) {
    cplx g = 0.0;
    for (int n = 0; n < size; ++n) g += c[n] * phi(n, k);
    const cplx e = exact.value(q.x[k]);
    err += q.w[k] * std::norm(g - e);
    norm += q.w[k] * std::norm(e);
  }
  return std::sqrt(err / norm);
}

// Splits u in dom(S*) as u0 + S_F^{-1} k1 + k2 with u0 in dom(S) and k1, k2 in
// ker(S*) = span{1, x}; returns the largest boundary value or slope left in u0.
inline double adjoint_domain_split_defect(const IntervalField& u) {
  const IntervalModel model;
  const cplx a = u.value(0.0), b = u.value(1.0);
  const IntervalField k2 = IntervalField::polynomial({a, b - a});
  const IntervalField v = u - k2;
  // S_F^{-1}(1) and S_F^{-1}(x) and their slopes at the ends.
  const auto w1 = model::dirichlet_resolvent(model, 0.0, IntervalField::constant(1.0));
  const auto wx = model::dirichlet_resolvent(model, 0.0, IntervalField::polynomial({0.0, 1.0}));
  CMat m(2, 2);
  m << w1.derivative(0.0), wx.derivative(0.0), w1.derivative(1.0), wx.derivative(1.0);
  const CVec coef = m.partialPivLu().solve(CVec{{v.derivative(0.0), v.derivative(1.0)}});
  const IntervalField u0 = v - (coef[0] * w1 + coef[1] * wx);
  return std::max({std::abs(u0.value(0.0)), std::abs(u0.value(1.0)), std::abs(u0.derivative(0.0)),
                   std::abs(u0.derivative(1.0)), std::abs((u0 + coef[0] * w1 + coef[1] * wx + k2 - u).value(0.5))});
}

// Boundary operator of the nonnegative extension with W = ker(S*) and B = b I:
// L = -b gamma_N S_F^{-1} P_0, column by column.
inline CMat alonso_simon_operator(double b) {
  const IntervalModel model;
  CMat l(2, 2);
  for (int j = 0; j < 2; ++j) {
    const CVec e = CVec::Unit(2, j);
    const auto h = model::poisson(model, 0.0, e);
    l.col(j) = -b * model.gamma_n(model::dirichlet_resolvent(model, 0.0, h));
  }
  return l;
}

// b times the Gram matrix of the harmonic extensions, (P_0 e_j, P_0 e_i).
inline CMat alonso_simon_gram(double b) {
  const IntervalModel model;
  CMat g(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      g(i, j) = b * model.inner(model::poisson(model, 0.0, CVec::Unit(2, j)), model::poisson(model, 0.0, CVec::Unit(2, i)));
  return g;
}

// Member f + b S_F^{-1} w + w of the extension's domain, with its image S f + b w.
// Returns max(boundary residual, operator residual at sample points).
inline double alonso_simon_member_defect(double b) {
  const IntervalModel model;
  const ext::Extension<IntervalModel> e(ext::ExtensionSpec::general(alonso_simon_operator(b)).at(0.0), model);
  const IntervalField f = IntervalField::polynomial({0.0, 0.0, 1.0, -2.0, 1.0});  // x^2 (1 - x)^2
  const IntervalField w = IntervalField::polynomial({1.0, 2.0});
  const IntervalField u = f + b * model::dirichlet_resolvent(model, 0.0, w) + w;
  const IntervalField image = model.apply_op(f, 0.0) + b * w;
  const IntervalField diff = model.apply_op(u, 0.0) - image;
  double worst = ext::boundary_residual(e, u);
  for (double x : model.quadrature().x) worst = std::max(worst, std::abs(diff.value(x)));
  return worst;
}

// max_{a,b in {1, x}} |(-d^2/dx^2) k| and the Krein boundary residual of k.
inline double krein_kernel_defect() {
  const IntervalModel model;
  const auto e = ext::Extension<IntervalModel>(ext::ExtensionSpec::krein().at(0.0), model);
  double worst = 0.0;
  for (const auto& k : {IntervalField::constant(1.0), IntervalField::polynomial({0.0, 1.0})}) {
    worst = std::max(worst, ext::boundary_residual(e, k));
    const auto lap = model.apply_op(k, 0.0);
    for (double x : model.quadrature().x) worst = std::max(worst, std::abs(lap.value(x)));
  }
  return worst;
}

}  // namespace kreinlab::abstract
