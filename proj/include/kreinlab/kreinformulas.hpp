#pragma once

// Krein-type resolvent formulas for the extensions of extensions.hpp, the
// boundary Weyl function M^D = [L - M(z + z0) + M(z0)]^{-1} and its checks,
// the transfer operator between two extensions, and the sign ledger.

#include <algorithm>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kreinlab/extensions.hpp"
#include "kreinlab/layerpot.hpp"

namespace kreinlab::krein {

using ext::Extension;
using ext::ExtensionSpec;

template <BoundaryBackend B>
layerpot::BoundaryOperator mfunc(const Extension<B>& e, cplx z) {
  layerpot::BoundaryOperator op{ext::weyl_function(e, z), layerpot::Role::MD, z, 0};
  return op;
}

// M^D from its trace definition gamma_D [gamma_D R_ext(conj z)]^*: for data g the
// adjoint is the w-harmonic h with P(tau_N h + L gamma_D h) = P g, (I - P) gamma_D h = 0.
template <FieldBackend B>
CMat mfunc_trace(const Extension<B>& e, cplx z) {
  const cplx w = z + e.z0();
  const int n = e.boundary_dim();
  const auto [a, unused] = ext::boundary_system(e, w, CVec::Zero(n), CVec::Zero(n));
  const auto t = e.backend().harmonic_traces(w);
  return t.dir * la::solve_checked(a, e.projector(), Errc::near_eigenvalue, "z is an eigenvalue of the extension");
}

// [gamma_D R_ext(conj z)]^* g
template <FieldBackend B>
typename B::Field adjoint_trace_resolvent(const Extension<B>& e, cplx z, const CVec& g) {
  const cplx w = z + e.z0();
  const int n = e.boundary_dim();
  const auto [a, unused] = ext::boundary_system(e, w, CVec::Zero(n), CVec::Zero(n));
  const CVec coef = la::solve_checked(a, e.projector() * g, Errc::near_eigenvalue, "z is an eigenvalue of the extension");
  return e.backend().combine(w, coef);
}

// [tau_N(z0) R_D(conj w)]^* c = -P_w c, independent of z0.
template <FieldBackend B>
typename B::Field adjoint_tau_dirichlet_resolvent(const B& b, cplx w, const CVec& c) {
  auto h = model::poisson(b, w, c);
  h *= -1.0;
  return h;
}

// |<tau_N(z0) R_D(conj w) f, c> - (f, -P_w c)|, the adjoint relation behind the formulas.
template <FieldBackend B>
double adjoint_relation_defect(const B& b, cplx z0, cplx w, const typename B::Field& f, const CVec& c) {
  const auto u = model::dirichlet_resolvent(b, std::conj(w), f);
  const cplx lhs = la::pairing(traces::tau_N(b, z0, u), c, b.metric());
  const cplx rhs = b.inner(f, adjoint_tau_dirichlet_resolvent(b, w, c));
  return std::abs(lhs - rhs);
}

template <BoundaryBackend B>
double mfunc_symmetry_defect(const Extension<B>& e, cplx z) {
  const RVec& w = e.metric();
  return la::op_norm(la::adjoint(ext::weyl_function(e, z), w) - ext::weyl_function(e, std::conj(z)), w);
}

// max over the grid of -min eig Im M^D(z); needs X = full.
template <BoundaryBackend B>
double herglotz_defect(const Extension<B>& e, std::span<const cplx> zs) {
  if (!e.full_subspace()) throw Error(Errc::spec_invalid, "the Herglotz property needs X = full");
  double worst = -INFINITY;
  for (const cplx z : zs) {
    if (!(z.imag() > 0.0)) throw Error(Errc::domain_error, "Herglotz grid must lie in the upper half plane");
    worst = std::max(worst, -la::imag_part_eigs(ext::weyl_function(e, z), e.metric()).minCoeff());
  }
  return worst;
}

// Twenty points in the upper half plane used by the Herglotz suites.
inline std::vector<cplx> herglotz_grid() {
  std::vector<cplx> g;
  for (double re : {-4.0, -1.0, 0.5, 2.0, 6.0})
    for (double im : {0.05, 0.5, 2.0, 8.0}) g.emplace_back(re, im);
  return g;
}

// R_D(w) f + sign [tau_N(z0) R_D(conj w)]^* M^D(z) tau_N(z0) R_D(w) f, w = z + z0.
template <FieldBackend B>
typename B::Field krein_resolvent_rhs(const Extension<B>& e, cplx z, const typename B::Field& f, int sign = +1) {
  if (e.reference() != ext::Reference::dirichlet)
    throw Error(Errc::spec_invalid, "the Krein formula is stated for the Dirichlet reference");
  const auto& b = e.backend();
  const cplx w = z + e.z0();
  auto u = model::dirichlet_resolvent(b, w, f);
  if (e.projector().norm() == 0.0) return u;
  const CVec t = traces::tau_N(b, e.z0(), u);
  auto corr = adjoint_tau_dirichlet_resolvent(b, w, ext::weyl_function(e, z) * t);
  corr *= double(sign);
  return u + corr;
}

// R_D(w) f + sign [gamma_D R_ext(conj z)]^* tau_N(z0) R_D(w) f.
template <FieldBackend B>
typename B::Field one_sided_rhs(const Extension<B>& e, cplx z, const typename B::Field& f, int sign) {
  const auto& b = e.backend();
  const cplx w = z + e.z0();
  auto u = model::dirichlet_resolvent(b, w, f);
  if (e.projector().norm() == 0.0) return u;
  auto corr = adjoint_trace_resolvent(e, z, traces::tau_N(b, e.z0(), u));
  corr *= double(sign);
  return u + corr;
}

template <FieldBackend B>
double relative_gap(const B& b, const typename B::Field& u, const typename B::Field& v) {
  const double scale = std::max(model::field_norm(b, v), 1e-300);
  return model::field_norm(b, u - v) / scale;
}

struct SignTest {
  int validated_sign = 0;  // 0 when neither candidate matches
  double residual_plus = 0.0;
  double residual_minus = 0.0;
};

// Which sign of the one-sided resolvent relation reproduces the direct solve.
template <FieldBackend B>
SignTest one_sided_sign_test(const Extension<B>& e, cplx z, const typename B::Field& f, double tol = 1e-9) {
  const auto direct = ext::direct_resolvent(e, z, f);
  SignTest s;
  s.residual_plus = relative_gap(e.backend(), one_sided_rhs(e, z, f, +1), direct);
  s.residual_minus = relative_gap(e.backend(), one_sided_rhs(e, z, f, -1), direct);
  if (s.residual_plus <= tol && s.residual_minus > tol) s.validated_sign = +1;
  if (s.residual_minus <= tol && s.residual_plus > tol) s.validated_sign = -1;
  return s;
}

template <FieldBackend B>
SignTest krein_formula_sign_test(const Extension<B>& e, cplx z, const typename B::Field& f, double tol = 1e-9) {
  const auto direct = ext::direct_resolvent(e, z, f);
  SignTest s;
  s.residual_plus = relative_gap(e.backend(), krein_resolvent_rhs(e, z, f, +1), direct);
  s.residual_minus = relative_gap(e.backend(), krein_resolvent_rhs(e, z, f, -1), direct);
  if (s.residual_plus <= tol && s.residual_minus > tol) s.validated_sign = +1;
  if (s.residual_minus <= tol && s.residual_plus > tol) s.validated_sign = -1;
  return s;
}

// Transfer operator between the full-X extensions with L1 and L2:
//   (ext2 - z)^{-1} = (ext1 - z)^{-1} + [gamma_D (ext1 - conj z)^{-1}]^* T [gamma_D (ext1 - z)^{-1}].
// Two printed forms exist; they differ by the sign convention for L.
enum class TransferForm { minus_l, plus_l };

inline std::string_view transfer_form_name(TransferForm f) {
  return f == TransferForm::minus_l ? "-(L2-L1)[M(z0)-M(w)+L2]^{-1}[M(z0)-M(w)+L1]"
                                    : "(L2-L1)[M(z0)-M(w)-L2]^{-1}[M(z0)-M(w)-L1]";
}

template <BoundaryBackend B>
CMat transfer_operator(const B& b, const CMat& l1, const CMat& l2, double z0, cplx z, TransferForm form) {
  const cplx w = z + z0;
  const CMat base = b.dtn(z0) - b.dtn(w);
  const double s = form == TransferForm::minus_l ? 1.0 : -1.0;
  const CMat b2 = base + s * l2;
  const CMat b1 = base + s * l1;
  const CMat t = (l2 - l1) * la::solve_checked(b2, b1, Errc::near_eigenvalue, "z is an eigenvalue of the second extension");
  return form == TransferForm::minus_l ? CMat(-t) : t;
}

// M1^{-1} (M2 - M1) M1^{-1} with M_j the boundary Weyl functions.
template <BoundaryBackend B>
CMat transfer_operator_alternative(const B& b, const CMat& l1, const CMat& l2, double z0, cplx z) {
  const Extension<B> e1(ExtensionSpec::general(l1).at(z0), b);
  const Extension<B> e2(ExtensionSpec::general(l2).at(z0), b);
  const CMat m1 = ext::weyl_function(e1, z), m2 = ext::weyl_function(e2, z);
  const CMat m1inv = la::inverse_checked(m1, Errc::near_eigenvalue, "M^D of the first extension is singular");
  return m1inv * (m2 - m1) * m1inv;
}

struct TransferResult {
  CMat op;
  TransferForm form = TransferForm::minus_l;
  double residual_minus_l = 0.0;
  double residual_plus_l = 0.0;
  double alternative_defect = 0.0;  // relative gap to M1^{-1}(M2 - M1)M1^{-1}
};

// Evaluates both printed forms against direct resolvent solves on the probes and
// returns the one that satisfies the resolvent relation.
template <FieldBackend B>
TransferResult two_extension_transfer(const B& b, const CMat& l1, const CMat& l2, double z0, cplx z,
                                      const std::vector<typename B::Field>& probes) {
  const Extension<B> e1(ExtensionSpec::general(l1).at(z0), b);
  const Extension<B> e2(ExtensionSpec::general(l2).at(z0), b);
  auto residual = [&](const CMat& t) {
    double worst = 0.0;
    for (const auto& f : probes) {
      const auto r1 = ext::direct_resolvent(e1, z, f);
      const auto r2 = ext::direct_resolvent(e2, z, f);
      const auto rhs = r1 + adjoint_trace_resolvent(e1, z, t * b.gamma_d(r1));
      worst = std::max(worst, relative_gap(b, rhs, r2));
    }
    return worst;
  };
  TransferResult r;
  const CMat tm = transfer_operator(b, l1, l2, z0, z, TransferForm::minus_l);
  const CMat tp = transfer_operator(b, l1, l2, z0, z, TransferForm::plus_l);
  r.residual_minus_l = residual(tm);
  r.residual_plus_l = residual(tp);
  r.form = r.residual_minus_l <= r.residual_plus_l ? TransferForm::minus_l : TransferForm::plus_l;
  r.op = r.form == TransferForm::minus_l ? tm : tp;
  const CMat alt = transfer_operator_alternative(b, l1, l2, z0, z);
  r.alternative_defect = la::op_norm(r.op - alt, b.metric()) / std::max(1.0, la::op_norm(alt, b.metric()));
  return r;
}

// || tau_N(z0) [gamma_D R_ext(conj z)]^* - [M(z0) - M(z + z0)] M^D(z) ||, the left side from
// the trace definition and the right side from the bracket inverse.
template <FieldBackend B>
double smoothing_factorization_check(const Extension<B>& e, cplx z) {
  const cplx w = z + e.z0();
  const int n = e.boundary_dim();
  const auto& b = e.backend();
  const auto [a, unused] = ext::boundary_system(e, w, CVec::Zero(n), CVec::Zero(n));
  const auto t = b.harmonic_traces(w);
  const CMat coef = la::solve_checked(a, e.projector(), Errc::near_eigenvalue, "z is an eigenvalue of the extension");
  const CMat lhs = (t.neu + e.reference_map() * t.dir) * coef;
  const CMat rhs = (e.reference_map() - b.dtn(w)) * ext::weyl_function(e, z);
  return la::op_norm(lhs - rhs, e.metric());
}

// ---------------------------------------------------------------------------
// Sign ledger

struct SignEntry {
  std::string identity;
  std::string printed_sign;
  std::string validated_sign;
  std::string witness;
  double residual = 0.0;           // under the validated sign
  double rejected_residual = 0.0;  // under the other candidate
  double tolerance = 0.0;
  bool consistent() const { return residual <= tolerance && rejected_residual > tolerance; }
};

// Append-only record; each entry keeps the witness that produced it so it can be re-run.
class SignLedger {
 public:
  void record(SignEntry entry, std::function<SignEntry()> witness) {
    entries_.push_back(std::move(entry));
    witnesses_.push_back(std::move(witness));
  }
  const std::vector<SignEntry>& entries() const { return entries_; }
  bool consistent() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const SignEntry& e) { return e.consistent(); });
  }
  // Re-evaluates entry i and reports whether the validated sign is reproduced.
  bool reproduce(std::size_t i) const {
    const SignEntry again = witnesses_.at(i)();
    return again.validated_sign == entries_.at(i).validated_sign && again.consistent();
  }

 private:
  std::vector<SignEntry> entries_;
  std::vector<std::function<SignEntry()>> witnesses_;
};

}  // namespace kreinlab::krein
