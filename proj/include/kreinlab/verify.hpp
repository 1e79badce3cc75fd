#pragma once

// Identity suites over the interval model, the disk (Nystrom at R = 1.3 and the
// Fourier-Bessel model) and the kite, plus the sign ledger that fixes the
// conventions every suite relies on.

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kreinlab/abstract1d.hpp"
#include "kreinlab/extensions.hpp"
#include "kreinlab/kreinformulas.hpp"
#include "kreinlab/spectral.hpp"
#include "kreinlab/traces.hpp"
#include "kreinlab/weyl.hpp"

namespace kreinlab::verify {

enum class Suite { weyl, traces, krein, abstract, all };
enum class Target { interval, disk, kite };

inline Suite parse_suite(const std::string& s) {
  if (s == "weyl") return Suite::weyl;
  if (s == "traces") return Suite::traces;
  if (s == "krein") return Suite::krein;
  if (s == "abstract") return Suite::abstract;
  if (s == "all") return Suite::all;
  throw Error(Errc::spec_invalid, "unknown suite '" + s + "'");
}

inline Target parse_target(const std::string& s) {
  if (s == "interval") return Target::interval;
  if (s == "disk") return Target::disk;
  if (s == "kite") return Target::kite;
  throw Error(Errc::spec_invalid, "unknown backend '" + s + "'");
}

inline std::string target_name(Target t) {
  switch (t) {
    case Target::interval: return "interval";
    case Target::disk: return "disk";
    case Target::kite: return "kite";
  }
  return "unknown";
}

struct CheckResult {
  std::string identity;
  std::string paper_ref;  // short description of the identity being exercised
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string sign_used;
  std::string error;  // set when the check threw
};

// Names accepted by Options::inject (one per ledger entry).
inline const std::vector<std::string>& ledger_identities() {
  static const std::vector<std::string> names{"boundary_condition_convention", "jump_relation",
                                              "krein_resolvent_formula",      "ntd_sign",
                                              "one_sided_resolvent_relation", "two_extension_transfer"};
  return names;
}

struct Options {
  std::uint64_t seed = 1;
  int nodes = 256;           // Nystrom nodes for disk and kite
  double tol_scale = 1.0;    // multiplies every tolerance
  std::set<std::string> inject;  // ledger identities whose sign is deliberately flipped
};

// Conventions read off the ledger witnesses.
struct Conventions {
  int jump = +1;        // gamma_N S_z = (jump/2 + K#_z)
  int one_sided = -1;   // sign of the correction in the one-sided resolvent relation
  int krein = +1;       // sign of the correction in the Krein formula
  krein::TransferForm transfer = krein::TransferForm::minus_l;
  int bc = +1;          // boundary condition tau_N(z0) u + bc L gamma_D u = 0
  int ntd = +1;         // ntd(z) is (+1) positive or (-1) negative semidefinite for z < 0
};

struct Report {
  Target target = Target::interval;
  Suite suite = Suite::all;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  krein::SignLedger ledger;
  Conventions conventions;

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
  }
  // Ledger identities whose recorded sign fails its witness.
  std::vector<std::string> violated() const {
    std::vector<std::string> out;
    for (const auto& e : ledger.entries())
      if (!e.consistent()) out.push_back(e.identity);
    return out;
  }
};

namespace detail {

inline std::string sign_text(int s) { return s > 0 ? "+" : "-"; }

inline CMat random_hermitian(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CMat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cplx(u(rng), u(rng));
  return scale * 0.5 * (a + a.adjoint());
}

// A positive semidefinite Hermitian matrix, B B^*.
inline CMat random_nonnegative(int n, std::mt19937_64& rng, double scale = 1.0) {
  const CMat b = random_hermitian(n, rng, 1.0);
  return scale * b * b.adjoint() / double(n);
}

// W-self-adjoint operator supported on the resolved trigonometric subspace.
inline CMat random_resolved_hermitian(const geometry::BoundaryGrid& g, std::mt19937_64& rng) {
  const CMat q = weyl::resolved_frame(g);
  const CMat h = random_hermitian(int(q.cols()), rng, 0.5);
  return q * h * q.adjoint() * g.measure().asDiagonal();
}

class Collector {
 public:
  explicit Collector(double scale) : scale_(scale) {}

  void add(std::string id, std::string ref, double residual, double tol, std::string sign = "") {
    tol *= scale_;
    out_.push_back({std::move(id), std::move(ref), residual, tol, std::isfinite(residual) && residual <= tol,
                    std::move(sign), ""});
  }
  // A check whose pass condition is not a residual bound.
  void add_bool(std::string id, std::string ref, double value, double tol, bool pass, std::string sign = "") {
    out_.push_back({std::move(id), std::move(ref), value, tol * scale_, pass, std::move(sign), ""});
  }
  // Runs body; a thrown error fails the named check.
  void guard(const std::string& id, const std::string& ref, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      out_.push_back({id, ref, INFINITY, 0.0, false, "", e.what()});
    }
  }
  std::vector<CheckResult> take() { return std::move(out_); }

 private:
  double scale_;
  std::vector<CheckResult> out_;
};

// "@-1", "@2+1i": suffix naming the spectral parameter of a check.
inline std::string at(cplx z) {
  char buf[64];
  if (z.imag() == 0.0)
    std::snprintf(buf, sizeof buf, "@%g", z.real());
  else
    std::snprintf(buf, sizeof buf, "@%g%+gi", z.real(), z.imag());
  return buf;
}

inline double max_abs(const CMat& a) { return a.cwiseAbs().maxCoeff(); }

inline double rel(double num, double den) { return num / std::max(den, 1e-300); }

// Largest deviation of a circle Nystrom matrix from the diagonal action mode(k)
// on e^{ikt}, |k| <= kmax.
inline double mode_defect(const geometry::BoundaryGrid& g, const CMat& d, int kmax,
                          const std::function<cplx(int)>& mode) {
  double worst = 0.0;
  for (int k = -kmax; k <= kmax; ++k) {
    CVec e(g.n);
    for (int j = 0; j < g.n; ++j) e[j] = std::polar(1.0, k * g.t[j]);
    worst = std::max(worst, (d * e - mode(k) * e).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Sign ledger witnesses

namespace witness {

inline std::string sign_text_or_none(int s) { return s == 0 ? "none" : detail::sign_text(s); }

// Interior Neumann trace of the single layer with uniform density on the unit circle.
inline krein::SignEntry jump_relation(bool flip) {
  const auto g = geometry::make_grid(geometry::CurveSpec::circle(1.0), 64);
  const CMat k = layerpot::assemble_adjoint_double_layer(g, 0.0).matrix;
  const CVec one = CVec::Ones(g.n);
  const double plus = (0.5 * one + k * one).cwiseAbs().maxCoeff();
  const double minus = (-0.5 * one + k * one).cwiseAbs().maxCoeff();
  int s = plus < minus ? +1 : -1;
  if (flip) s = -s;
  return {"jump_relation", "-1/2", s > 0 ? "+1/2" : "-1/2",
          "uniform density on the unit circle, N = 64: gamma_N S_0 1 = (s/2 + K#_0) 1 vanishes inside",
          s > 0 ? plus : minus, s > 0 ? minus : plus, 1e-10};
}

inline oracles::IntervalField probe() { return oracles::IntervalField::sine(pi) + oracles::IntervalField::constant(0.5); }

// The one-sided resolvent relation against a direct boundary solve (Robin extension).
inline krein::SignEntry one_sided(bool flip) {
  const oracles::IntervalModel m;
  const ext::Extension<oracles::IntervalModel> e(ext::ExtensionSpec::robin(CMat::Identity(2, 2)).at(0.0), m);
  const auto t = krein::one_sided_sign_test(e, -1.0, probe());
  int s = t.validated_sign;
  if (flip) s = -s;
  return {"one_sided_resolvent_relation", "+", sign_text_or_none(s),
          "interval Robin(1) extension, z0 = 0, z = -1, f = sin(pi x) + 1/2 against a direct boundary solve",
          s > 0 ? t.residual_plus : t.residual_minus, s > 0 ? t.residual_minus : t.residual_plus, 1e-9};
}

inline krein::SignEntry krein_formula(bool flip) {
  const oracles::IntervalModel m;
  const ext::Extension<oracles::IntervalModel> e(ext::ExtensionSpec::krein().at(0.0), m);
  const auto t = krein::krein_formula_sign_test(e, -1.0, probe());
  int s = t.validated_sign;
  if (flip) s = -s;
  return {"krein_resolvent_formula", "+", sign_text_or_none(s),
          "interval Krein extension, z0 = 0, z = -1, f = sin(pi x) + 1/2 against a direct boundary solve",
          s > 0 ? t.residual_plus : t.residual_minus, s > 0 ? t.residual_minus : t.residual_plus, 1e-9};
}

inline krein::SignEntry transfer(bool flip) {
  const oracles::IntervalModel m;
  const CMat l1 = CMat::Zero(2, 2), l2 = -m.dtn(-1.0);
  const auto r = krein::two_extension_transfer(m, l1, l2, -1.0, -1.0, {oracles::IntervalField::constant(1.0), probe()});
  const bool minus = r.residual_minus_l <= r.residual_plus_l;
  const bool chosen_minus = flip ? !minus : minus;
  return {"two_extension_transfer",
          "two printed variants: " + std::string(krein::transfer_form_name(krein::TransferForm::minus_l)) + " and " +
              std::string(krein::transfer_form_name(krein::TransferForm::plus_l)),
          std::string(krein::transfer_form_name(chosen_minus ? krein::TransferForm::minus_l : krein::TransferForm::plus_l)),
          "interval, L1 = 0 (Krein), L2 = -M(z0) (Neumann), z0 = -1, z = -1, f = 1 and sin(pi x) + 1/2",
          chosen_minus ? r.residual_minus_l : r.residual_plus_l, chosen_minus ? r.residual_plus_l : r.residual_minus_l,
          1e-9};
}

// With L = -M(z0) the condition tau_N(z0) u + s L gamma_D u = 0 is the Neumann
// condition exactly when s = +1; residual |gamma_N u| of the resolvent output.
inline double neumann_case_residual(int s) {
  const oracles::IntervalModel m;
  const ext::Extension<oracles::IntervalModel> e(ext::ExtensionSpec::general(double(s) * -m.dtn(-1.0)).at(-1.0), m);
  const auto u = ext::apply_resolvent(e, -1.0, probe());
  return m.gamma_n(u).cwiseAbs().maxCoeff() / model::field_norm(m, u);
}

inline krein::SignEntry boundary_condition(bool flip) {
  const double plus = neumann_case_residual(+1), minus = neumann_case_residual(-1);
  int s = plus < minus ? +1 : -1;
  if (flip) s = -s;
  return {"boundary_condition_convention", "tau_N u = +L gamma_D u and tau_N u = -L gamma_D u both printed",
          s > 0 ? "tau_N(z0) u + L gamma_D u = 0" : "tau_N(z0) u = L gamma_D u",
          "interval, Neumann special case L = -M(z0), z0 = -1: gamma_N of the resolvent output",
          s > 0 ? plus : minus, s > 0 ? minus : plus, 1e-9};
}

// Semidefiniteness of ntd(-1) on the interval model.
inline krein::SignEntry ntd_sign(bool flip) {
  const oracles::IntervalModel m;
  const RVec ev = la::hermitian_part_eigs(m.ntd(-1.0), m.metric());
  const double as_pos = std::max(0.0, -ev.minCoeff()), as_neg = std::max(0.0, ev.maxCoeff());
  int s = as_pos < as_neg ? +1 : -1;
  if (flip) s = -s;
  return {"ntd_sign", "<= 0 for z < 0", s > 0 ? ">= 0 for z < 0" : "<= 0 for z < 0",
          "interval ntd(-1) = -dtn(-1)^{-1}: eigenvalues of the Hermitian part",
          s > 0 ? as_pos : as_neg, s > 0 ? as_neg : as_pos, 1e-10};
}

}  // namespace witness

// Records every witness; entries named in `inject` carry the rejected sign.
inline krein::SignLedger build_ledger(const std::set<std::string>& inject, Conventions& conv) {
  krein::SignLedger ledger;
  auto flip = [&](const char* id) { return inject.count(id) > 0; };
  auto add = [&](krein::SignEntry (*w)(bool), const char* id) {
    const bool f = flip(id);
    ledger.record(w(f), [w, f] { return w(f); });
  };
  add(witness::boundary_condition, "boundary_condition_convention");
  add(witness::jump_relation, "jump_relation");
  add(witness::krein_formula, "krein_resolvent_formula");
  add(witness::ntd_sign, "ntd_sign");
  add(witness::one_sided, "one_sided_resolvent_relation");
  add(witness::transfer, "two_extension_transfer");
  for (const auto& e : ledger.entries()) {
    const int s = e.validated_sign.rfind('-', 0) == 0 ? -1 : +1;
    if (e.identity == "boundary_condition_convention") conv.bc = e.validated_sign.find("+ L") != std::string::npos ? +1 : -1;
    if (e.identity == "jump_relation") conv.jump = s;
    if (e.identity == "krein_resolvent_formula") conv.krein = s;
    if (e.identity == "ntd_sign") conv.ntd = e.validated_sign.rfind(">=", 0) == 0 ? +1 : -1;
    if (e.identity == "one_sided_resolvent_relation") conv.one_sided = s;
    if (e.identity == "two_extension_transfer")
      conv.transfer = e.validated_sign == krein::transfer_form_name(krein::TransferForm::minus_l)
                          ? krein::TransferForm::minus_l
                          : krein::TransferForm::plus_l;
  }
  return ledger;
}

// ---------------------------------------------------------------------------
// Suites

namespace suites {

using oracles::DiskField;
using oracles::DiskModel;
using oracles::IntervalField;
using oracles::IntervalModel;

// Shared checks on a field backend's boundary maps.
template <BoundaryBackend B>
void boundary_map_checks(detail::Collector& c, const B& b, const Conventions& conv, const std::string& tag) {
  const RVec w = b.metric();
  const int n = b.boundary_dim();
  for (const cplx z : {cplx(-1.0), cplx(2.0, 1.0)}) {
    const std::string id = "weyl/" + tag + "/ntd_times_dtn_plus_identity" + detail::at(z);
    c.guard(id, "ntd(z) dtn(z) = -I",
            [&] { c.add(id, "ntd(z) dtn(z) = -I", la::op_norm(b.ntd(z) * b.dtn(z) + CMat::Identity(n, n), w), 1e-8); });
  }
  for (const cplx z : {cplx(2.0, 1.0), cplx(-3.0, 0.5)})
    c.add("weyl/" + tag + "/dtn_symmetry" + detail::at(z),
          "dtn(z)^* = dtn(conj z)", la::op_norm(la::adjoint(b.dtn(z), w) - b.dtn(std::conj(z)), w), 1e-8);
  for (const double z : {0.0, -1.0})
    c.add("weyl/" + tag + "/dtn_nonpositive" + detail::at(z), "Re dtn(z) <= 0 for z <= 0",
          std::max(0.0, la::hermitian_part_eigs(b.dtn(z), w).maxCoeff()), 1e-10);
  const RVec ev = la::hermitian_part_eigs(b.ntd(-1.0), w);
  c.add("weyl/" + tag + "/ntd_semidefinite@-1", "sign of Re ntd(z) for z < 0",
        conv.ntd > 0 ? std::max(0.0, -ev.minCoeff()) : std::max(0.0, ev.maxCoeff()), 1e-10,
        conv.ntd > 0 ? ">= 0" : "<= 0");
}

inline void weyl_interval(detail::Collector& c, const Conventions& conv) {
  const IntervalModel m;
  CMat d0(2, 2);
  d0 << -1.0, 1.0, 1.0, -1.0;
  c.add("weyl/interval/dtn_closed_form@0", "dtn(0) = [[-1,1],[1,-1]]", detail::max_abs(m.dtn(0.0) - d0), 1e-12);
  CMat d1(2, 2);
  d1 << -std::cosh(1.0), 1.0, 1.0, -std::cosh(1.0);
  d1 /= std::sinh(1.0);
  c.add("weyl/interval/dtn_closed_form@-1", "dtn(-1) = [[-cosh 1, 1],[1, -cosh 1]] / sinh 1",
        detail::max_abs(m.dtn(-1.0) - d1), 1e-12);
  CMat dq(2, 2);
  dq << 0.0, 1.0, 1.0, 0.0;
  c.add("weyl/interval/dtn_closed_form@pi^2/4", "dtn(pi^2/4) = (pi/2) [[0,1],[1,0]]",
        detail::max_abs(m.dtn(pi * pi / 4.0) - 0.5 * pi * dq), 1e-12);
  // ntd against the Neumann problem solved on the model
  const CVec g{{cplx(0.3, -0.2), cplx(-1.1, 0.4)}};
  const auto u = model::neumann_poisson(m, -1.0, g);
  c.add("weyl/interval/ntd_vs_neumann_solve@-1", "ntd(z) g = gamma_D u with gamma_N u = g",
        (m.gamma_d(u) - m.ntd(-1.0) * g).norm(), 1e-8);
  boundary_map_checks(c, m, conv, "interval");
}

inline void jump_check(detail::Collector& c, const Conventions& conv) {
  const auto g = geometry::make_grid(geometry::CurveSpec::circle(1.0), 64);
  const CMat k = layerpot::assemble_adjoint_double_layer(g, 0.0).matrix;
  const CVec one = CVec::Ones(g.n);
  c.add("weyl/jump_relation_unit_circle", "interior Neumann trace of S_0 with uniform density",
        (0.5 * conv.jump * one + k * one).cwiseAbs().maxCoeff(), 1e-10, conv.jump > 0 ? "+1/2" : "-1/2");
}

// Nystrom-level checks on a curve; symmetry and signs on the resolved subspace.
inline void weyl_curve(detail::Collector& c, const geometry::BoundaryGrid& g, const Conventions& conv,
                       const std::string& tag) {
  const int n = g.n;
  const RVec w = g.measure();
  for (const cplx z : {cplx(-1.0), cplx(2.0, 1.0)}) {
    const std::string id = "weyl/" + tag + "/ntd_times_dtn_plus_identity" + detail::at(z);
    c.guard(id, "ntd(z) dtn(z) = -I", [&] {
      c.add(id, "ntd(z) dtn(z) = -I",
            la::op_norm(weyl::ntd(g, z).matrix * weyl::dtn(g, z).matrix + CMat::Identity(n, n), w), 1e-8);
    });
  }
  for (const cplx z : {cplx(2.0, 1.0), cplx(-3.0, 0.5)}) {
    const std::string id = "weyl/" + tag + "/dtn_symmetry" + detail::at(z);
    c.guard(id, "dtn(z)^* = dtn(conj z)", [&] {
      c.add(id, "dtn(z)^* = dtn(conj z) on resolved modes",
            weyl::resolved_symmetry_defect(g, weyl::dtn(g, z).matrix, weyl::dtn(g, std::conj(z)).matrix), 1e-8);
    });
  }
  for (const double z : {0.0, -1.0}) {
    const std::string id = "weyl/" + tag + "/dtn_nonpositive" + detail::at(z);
    c.guard(id, "Re dtn(z) <= 0 for z <= 0", [&] {
      c.add(id, "Re dtn(z) <= 0 for z <= 0 on resolved modes",
            std::max(0.0, weyl::resolved_hermitian_part_eigs(g, weyl::dtn(g, z).matrix).maxCoeff()), 1e-10);
    });
  }
  c.guard("weyl/" + tag + "/ntd_semidefinite@-1", "sign of Re ntd(z) for z < 0", [&] {
    const RVec ev = weyl::resolved_hermitian_part_eigs(g, weyl::ntd(g, -1.0).matrix);
    c.add("weyl/" + tag + "/ntd_semidefinite@-1", "sign of Re ntd(z) for z < 0 on resolved modes",
          conv.ntd > 0 ? std::max(0.0, -ev.minCoeff()) : std::max(0.0, ev.maxCoeff()), 1e-10,
          conv.ntd > 0 ? ">= 0" : "<= 0");
  });
  // Neumann solve consistency and an interior value against e^x, which solves -Delta u + u = 0.
  c.guard("weyl/" + tag + "/ntd_vs_neumann_solve@-1", "ntd(z) g = gamma_D u with gamma_N u = g", [&] {
    CVec data(n);
    for (int j = 0; j < n; ++j) data[j] = std::cos(g.t[j]) + 0.5 * std::sin(2.0 * g.t[j]);
    const auto u = weyl::solve_neumann(g, -1.0, data);
    c.add("weyl/" + tag + "/ntd_vs_neumann_solve@-1", "ntd(z) g = gamma_D u with gamma_N u = g",
          detail::rel((u.trace_d - weyl::ntd(g, -1.0).matrix * data).norm(), data.norm()), 1e-8);
  });
  c.guard("weyl/" + tag + "/dirichlet_interior_value@-1", "Dirichlet problem reproduces e^x inside", [&] {
    CVec f(n);
    for (int j = 0; j < n; ++j) f[j] = std::exp(g.x(j, 0));
    const double px = g.curve.kind == geometry::CurveKind::kite ? -0.2 : 0.1, py = 0.3;
    const auto u = weyl::solve_dirichlet(g, -1.0, f);
    c.add("weyl/" + tag + "/dirichlet_interior_value@-1", "Dirichlet problem reproduces e^x inside",
          std::abs(u.value(px, py) - std::exp(px)), 1e-8);
  });
}

inline void weyl_disk(detail::Collector& c, const Conventions& conv, const Options& opt) {
  const auto g = geometry::make_grid(geometry::CurveSpec::circle(1.3), opt.nodes);
  c.guard("weyl/disk/dtn_modes@0", "dtn(0) e^{ik theta} = -|k|/R e^{ik theta}", [&] {
    c.add("weyl/disk/dtn_modes@0", "dtn(0) e^{ik theta} = -|k|/R e^{ik theta}, |k| <= 10",
          detail::mode_defect(g, weyl::dtn(g, 0.0).matrix, 10, [](int k) { return cplx(-std::abs(k) / 1.3); }), 1e-8);
  });
  for (const cplx z : {cplx(-1.0), cplx(2.0, 1.0)}) {
    const std::string id = "weyl/disk/dtn_modes_bessel" + detail::at(z);
    c.guard(id, "dtn(z) modes against -sqrt z J_k'/J_k", [&] {
      c.add(id, "dtn(z) modes against -sqrt z J_k'/J_k, |k| <= 10",
            detail::mode_defect(g, weyl::dtn(g, z).matrix, 10, [&](int k) { return oracles::disk_mode_dtn(k, z, 1.3); }),
            1e-8);
    });
  }
  const auto unit = geometry::make_grid(geometry::CurveSpec::circle(1.0), opt.nodes);
  for (const cplx z : {cplx(-1.0), cplx(1.0), cplx(2.0, 1.0)}) {
    const std::string id =
        "weyl/disk/unit_mode_formula" + detail::at(z);
    c.guard(id, "unit disk mode formula", [&] {
      c.add(id, "unit disk dtn modes against -sqrt z J_k'/J_k, |k| <= 10",
            detail::mode_defect(unit, weyl::dtn(unit, z).matrix, 10,
                                [&](int k) { return oracles::disk_mode_dtn(k, z, 1.0); }),
            1e-8);
    });
  }
  weyl_curve(c, g, conv, "disk");
  jump_check(c, conv);
  // Decay of dtn differences: m_k(-1) - m_k(-2) = C/k with C from m_k(z) ~ -k + z/(2(k+1)).
  const DiskModel big(1.0, 32);
  const CMat d1 = big.dtn(-1.0), d2 = big.dtn(-2.0);
  double fitted = 0.0;
  for (int k = 4; k <= 32; ++k) fitted = std::max(fitted, k * std::abs(d1(k + 32, k + 32) - d2(k + 32, k + 32)));
  c.add("weyl/disk/dtn_difference_decay", "k |m_k(-1) - m_k(-2)| <= |z1 - z2|/2 for k in [4, 32]", fitted, 0.5);
  // Fourier-Bessel model
  const DiskModel dm(1.0, 8);
  boundary_map_checks(c, dm, conv, "disk_fourier_bessel");
}

inline void weyl_kite(detail::Collector& c, const Conventions& conv, const Options& opt) {
  const auto g = geometry::make_grid(geometry::CurveSpec::kite(), opt.nodes);
  weyl_curve(c, g, conv, "kite");
  jump_check(c, conv);
}

// --- traces --------------------------------------------------------------

inline IntervalField traces_surrogate(const IntervalModel&) {
  return IntervalField::polynomial({0.0, 0.0, 1.0, -2.0, 1.0});  // x^2 (1 - x)^2
}

inline DiskField traces_surrogate(const DiskModel& m) {
  // (1 - r^2)^2 (1 + r^2 e^{2 i theta})
  DiskField f(m.cutoff());
  f += DiskField::mode(m.cutoff(), 0, {1.0, -2.0, 1.0});
  f += DiskField::mode(m.cutoff(), 2, {1.0, -2.0, 1.0});
  return f;
}

template <FieldBackend B>
void trace_identities(detail::Collector& c, const B& b, const std::string& tag, double z0,
                      const typename B::Field& u, const typename B::Field& v, double green_tol) {
  const int n = b.boundary_dim();
  const RVec w = b.metric();
  // z0-harmonic field
  CVec a(n);
  for (int i = 0; i < n; ++i) a[i] = cplx(0.3 + 0.1 * i, -0.7 + 0.05 * i * i);
  const auto h = b.combine(z0, a);
  const double hs = model::field_norm(b, h);
  c.add("traces/" + tag + "/tau_n_kernel", "tau_N(z0) vanishes on z0-harmonic fields",
        la::norm(traces::tau_N(b, z0, h), w) / hs, 1e-8);
  c.add("traces/" + tag + "/tau_d_kernel", "tau_D(z0) vanishes on z0-harmonic fields",
        la::norm(traces::tau_D(b, z0, h), w) / hs, 1e-8);
  // factorizations through the reference resolvents
  const auto fu = b.apply_op(u, z0);
  c.add("traces/" + tag + "/tau_n_factorization", "tau_N(z0) u = gamma_N R_D(z0) (-Delta - z0) u",
        la::norm(traces::tau_N(b, z0, u) - b.gamma_n(model::dirichlet_resolvent(b, z0, fu)), w), 1e-10);
  c.add("traces/" + tag + "/tau_d_factorization", "tau_D(z0) u = gamma_D R_N(z0) (-Delta - z0) u",
        la::norm(traces::tau_D(b, z0, u) - b.gamma_d(model::neumann_resolvent(b, z0, fu)), w), 1e-10);
  c.add("traces/" + tag + "/tau_d_from_tau_n", "tau_D(z) u = -ntd(z) tau_N(z) u",
        la::norm(traces::tau_D(b, z0, u) + b.ntd(z0) * traces::tau_N(b, z0, u), w), 1e-10);
  // surrogate with vanishing Dirichlet trace: tau_N = gamma_N
  const auto s = model::dirichlet_resolvent(b, z0, u);
  c.add("traces/" + tag + "/tau_n_on_zero_dirichlet", "tau_N(z0) w = gamma_N w when gamma_D w = 0",
        la::norm(traces::tau_N(b, z0, s) - b.gamma_n(s), w), 1e-12 * std::max(1.0, la::norm(b.gamma_n(s), w)));
  // Green formulas
  c.add("traces/" + tag + "/green_formula@-1", "Green formula with regularized traces",
        traces::green_defect(b, -1.0, u, v), green_tol);
  const cplx zc(2.0, 1.0);
  const auto hu = b.combine(zc, a), hv = b.combine(std::conj(zc), CVec(a.reverse()));
  c.add("traces/" + tag + "/green_formula_harmonic@2+1i", "Green formula for (-Delta - z)-harmonic pairs",
        traces::green_defect(b, zc, hu, hv), 1e-10 * std::max(1.0, model::field_norm(b, hu) * model::field_norm(b, hv)));
  // classical pairing for s with gamma_D s = 0: <gamma_N s, gamma_D u> = (Delta s, u) - (s, Delta u)
  const auto lap = [&](const typename B::Field& f) {
    auto r = b.apply_op(f, 0.0);
    r *= -1.0;
    return r;
  };
  const cplx lhs = la::pairing(b.gamma_n(s), b.gamma_d(u), w);
  const cplx rhs = b.inner(lap(s), u) - b.inner(s, lap(u));
  c.add("traces/" + tag + "/classical_green_pairing", "<gamma_N w, gamma_D u> = (Delta w, u) - (w, Delta u)",
        std::abs(lhs - rhs), 1e-8);
  // range of tau_N over the zero-trace surrogates: full numerical rank
  auto family = b.trial_family(3 * n);
  CMat cols(n, Eigen::Index(family.size()));
  for (std::size_t j = 0; j < family.size(); ++j)
    cols.col(Eigen::Index(j)) = traces::tau_N(b, z0, model::dirichlet_resolvent(b, z0, family[j]));
  Eigen::JacobiSVD<CMat> svd(cols);
  const RVec sv = svd.singularValues();
  c.add("traces/" + tag + "/tau_n_range_rank", "tau_N(z0) maps zero-trace surrogates onto the boundary space",
        sv.maxCoeff() / std::max(sv.minCoeff(), 1e-300), 1e10);
  // kernel decomposition: compactly supported surrogate plus z0-harmonic field
  c.add("traces/" + tag + "/tau_n_kernel_decomposition", "tau_N(z0) kills H^2_0 surrogate + z0-harmonic",
        la::norm(traces::tau_N(b, z0, traces_surrogate(b) + h), w) / hs, 1e-8);
}

inline void traces_interval(detail::Collector& c) {
  const IntervalModel m;
  const auto one = IntervalField::constant(1.0), x = IntervalField::polynomial({0.0, 1.0});
  const double elem = std::max({(m.gamma_d(one) - CVec::Ones(2)).cwiseAbs().maxCoeff(),
                                (m.gamma_n(one)).cwiseAbs().maxCoeff(),
                                (m.gamma_d(x) - CVec{{0.0, 1.0}}).cwiseAbs().maxCoeff(),
                                (m.gamma_n(x) - CVec{{-1.0, 1.0}}).cwiseAbs().maxCoeff()});
  c.add("traces/interval/elementary_traces", "traces of 1 and x with outward normals", elem, 0.0);
  trace_identities(c, m, "interval", -1.0, IntervalField::polynomial({0.0, 0.0, 1.0}),
                   IntervalField::polynomial({0.0, 0.0, 0.0, 1.0}), 1e-10);
}

inline void traces_disk(detail::Collector& c) {
  const DiskModel m(1.0, 8);
  const int k = m.cutoff();
  // u = r cos theta has gamma_N u = gamma_D u on the unit circle
  const DiskField rc = 0.5 * DiskField::mode(k, 1, {1.0}) + 0.5 * DiskField::mode(k, -1, {1.0});
  c.add("traces/disk_fourier_bessel/normal_trace_of_x", "gamma_N (r cos theta) = cos theta",
        (m.gamma_n(rc) - m.gamma_d(rc)).norm(), 1e-14);
  const DiskField u = DiskField::mode(k, 1, {0.0, 1.0});  // r^3 e^{i theta}
  const DiskField v = DiskField::mode(k, 1, {1.0});       // r e^{i theta}
  trace_identities(c, m, "disk_fourier_bessel", -1.0, u + DiskField::mode(k, 0, {0.0, 1.0}), v, 1e-8);
}

inline void traces_kite(detail::Collector& c, const Options& opt) {
  const auto g = geometry::make_grid(geometry::CurveSpec::kite(), opt.nodes);
  const int n = g.n;
  const double z0 = -1.0;
  CVec f(n);
  for (int j = 0; j < n; ++j) f[j] = std::cos(g.t[j]) + cplx(0.0, 0.3) * std::sin(3.0 * g.t[j]);
  c.guard("traces/kite/tau_n_kernel", "tau_N(z0) vanishes on z0-harmonic fields", [&] {
    const auto u = weyl::solve_dirichlet(g, z0, f);
    c.add("traces/kite/tau_n_kernel", "tau_N(z0) vanishes on z0-harmonic fields",
          detail::rel(la::norm(traces::tau_N(z0, u), g.measure()), la::norm(f, g.measure())), 1e-8);
  });
  c.guard("traces/kite/tau_d_kernel", "tau_D(z0) vanishes on z0-harmonic fields", [&] {
    const auto u = weyl::solve_neumann(g, z0, f);
    c.add("traces/kite/tau_d_kernel", "tau_D(z0) vanishes on z0-harmonic fields",
          detail::rel(la::norm(traces::tau_D(z0, u), g.measure()), la::norm(u.trace_d, g.measure())), 1e-8);
  });
  c.guard("traces/kite/tau_d_from_tau_n", "tau_D(z0) u = -ntd(z0) tau_N(z0) u", [&] {
    const auto u = weyl::solve_dirichlet(g, cplx(2.0, 1.0), f);
    const CVec td = traces::tau_D(z0, u), tn = traces::tau_N(z0, u);
    c.add("traces/kite/tau_d_from_tau_n", "tau_D(z0) u = -ntd(z0) tau_N(z0) u",
          detail::rel(la::norm(td + weyl::ntd(g, z0).matrix * tn, g.measure()), la::norm(td, g.measure())), 1e-8);
  });
  // Layer fields carry no interior quadrature: the Green meter must refuse them.
  bool refused = false;
  try {
    const auto u = weyl::solve_dirichlet(g, z0, f);
    traces::green_defect(z0, u, u);
  } catch (const Error& e) {
    refused = e.code() == Errc::quadrature_unavailable;
  }
  c.add_bool("traces/kite/green_formula_layer_fields", "Green meter reports missing interior quadrature",
             refused ? 0.0 : 1.0, 0.0, refused);
}

// --- Krein formulas ---------------------------------------------------------

template <FieldBackend B>
void krein_field_checks(detail::Collector& c, const B& b, const Conventions& conv, const std::string& tag, double z0,
                        const std::vector<cplx>& real_z, const std::vector<typename B::Field>& probes, double tol,
                        std::mt19937_64& rng) {
  using Ext = ext::Extension<B>;
  const int n = b.boundary_dim();
  const RVec w = b.metric();
  const CMat rl = detail::random_hermitian(n, rng);
  struct Named {
    std::string name;
    Ext e;
  };
  std::vector<Named> exts{{"krein", Ext(ext::ExtensionSpec::krein().at(z0), b)},
                          {"neumann", Ext(ext::ExtensionSpec::neumann().at(z0), b)},
                          {"robin1", Ext(ext::ExtensionSpec::robin(CMat::Identity(n, n)).at(z0), b)},
                          {"random_l", Ext(ext::ExtensionSpec::general(rl).at(z0), b)}};
  const auto grid = krein::herglotz_grid();
  for (const auto& [name, e] : exts) {
    const std::string p = "krein/" + tag + "/" + name + "/";
    c.guard(p + "mfunc_vs_trace_definition", "M^D from the bracket inverse = trace definition", [&] {
      const cplx z(2.0, 3.0);
      const CMat m = ext::weyl_function(e, z);
      c.add(p + "mfunc_vs_trace_definition", "M^D from the bracket inverse = trace definition",
            detail::rel(la::op_norm(m - krein::mfunc_trace(e, z), w), la::op_norm(m, w)), tol);
    });
    for (const cplx z : {cplx(2.0, 3.0), cplx(-1.0, 0.5)}) {
      const std::string id = p + "mfunc_symmetry" + detail::at(z);
      c.guard(id, "M^D(z)^* = M^D(conj z)", [&] {
        c.add(id, "M^D(z)^* = M^D(conj z)", krein::mfunc_symmetry_defect(e, z), 1e-9);
      });
    }
    if (name != "neumann") {
      c.guard(p + "herglotz", "Im M^D >= 0 on the upper half plane grid", [&] {
        c.add(p + "herglotz", "Im M^D >= 0 on a 20-point upper half plane grid",
              std::max(0.0, krein::herglotz_defect(e, grid)), 1e-10);
      });
    }
    c.guard(p + "herglotz_reflection", "Im M^D(conj z) = -Im M^D(z)", [&] {
      const cplx z(0.5, 2.0);
      const CMat a = ext::weyl_function(e, z), bb = ext::weyl_function(e, std::conj(z));
      const CMat ia = (a - la::adjoint(a, w)) / (2.0 * I), ib = (bb - la::adjoint(bb, w)) / (2.0 * I);
      c.add(p + "herglotz_reflection", "Im M^D(conj z) = -Im M^D(z)", la::op_norm(ia + ib, w), 1e-9);
    });
    for (const cplx z : real_z) {
      const std::string zs = detail::at(z);
      c.guard(p + "krein_formula" + zs, "Krein resolvent formula against a direct boundary solve", [&] {
        double worst = 0.0;
        for (const auto& f : probes)
          worst = std::max(worst, krein::relative_gap(b, krein::krein_resolvent_rhs(e, z, f, conv.krein),
                                                      ext::direct_resolvent(e, z, f)));
        c.add(p + "krein_formula" + zs, "Krein resolvent formula against a direct boundary solve", worst, tol,
              detail::sign_text(conv.krein));
      });
      c.guard(p + "one_sided_relation" + zs, "one-sided resolvent relation against a direct solve", [&] {
        double worst = 0.0;
        for (const auto& f : probes)
          worst = std::max(worst, krein::relative_gap(b, krein::one_sided_rhs(e, z, f, conv.one_sided),
                                                      ext::direct_resolvent(e, z, f)));
        c.add(p + "one_sided_relation" + zs, "one-sided resolvent relation against a direct solve", worst, tol,
              detail::sign_text(conv.one_sided));
      });
      c.guard(p + "resolvent_engine" + zs, "resolvent engine output satisfies the equation and condition", [&] {
        double worst = 0.0;
        for (const auto& f : probes) {
          const auto u = ext::apply_resolvent(e, z, f);
          const double scale = model::field_norm(b, u);
          worst = std::max(worst, krein::relative_gap(b, u, ext::direct_resolvent(e, z, f)));
          worst = std::max(worst, ext::boundary_residual(e, u) / scale);
          worst = std::max(worst, model::field_norm(b, b.apply_op(u, z + z0) - f) / model::field_norm(b, f));
        }
        c.add(p + "resolvent_engine" + zs, "resolvent engine output satisfies the equation and condition", worst, tol);
      });
    }
    c.guard(p + "resolvent_self_adjoint", "(f, R(z) g) = conj (g, R(conj z) f)", [&] {
      const cplx z(0.7, 1.3);
      const auto& f = probes.front();
      const auto& g = probes.back();
      c.add(p + "resolvent_self_adjoint", "(f, R(z) g) = conj (g, R(conj z) f)",
            std::abs(b.inner(f, ext::apply_resolvent(e, z, g)) -
                     std::conj(b.inner(g, ext::apply_resolvent(e, std::conj(z), f)))),
            1e-10);
    });
    c.guard(p + "smoothing_factorization", "tau_N [gamma_D R_ext(conj z)]^* = [M(z0) - M(z+z0)] M^D", [&] {
      const double t = name == "krein" ? 1e-10 : name == "neumann" ? 1e-9 : 1e-8;
      c.add(p + "smoothing_factorization", "tau_N [gamma_D R_ext(conj z)]^* = [M(z0) - M(z+z0)] M^D",
            krein::smoothing_factorization_check(e, cplx(1.0, 2.0)), t);
    });
    // Minimal/maximal sandwich: R(z) (-Delta - z0 - z) phi = phi for a zero-trace, zero-flux surrogate.
    c.guard(p + "minimal_operator_sandwich", "R(z) (-Delta - z0 - z) phi = phi on H^2_0 surrogates", [&] {
      const auto phi = traces_surrogate(b);
      const cplx z(-0.5, 0.25);
      c.add(p + "minimal_operator_sandwich", "R(z) (-Delta - z0 - z) phi = phi on H^2_0 surrogates",
            krein::relative_gap(b, ext::apply_resolvent(e, z, b.apply_op(phi, z + z0)), phi), 1e-9);
    });
  }
  // Special cases
  c.guard("krein/" + tag + "/dirichlet/correction_vanishes", "Dirichlet case: no correction term", [&] {
    const Ext d(ext::ExtensionSpec::dirichlet().at(z0), b);
    const auto& f = probes.front();
    const cplx z = real_z.front();
    c.add("krein/" + tag + "/dirichlet/correction_vanishes", "Dirichlet case: no correction term",
          krein::relative_gap(b, krein::krein_resolvent_rhs(d, z, f, conv.krein), model::dirichlet_resolvent(b, z + z0, f)),
          0.0);
  });
  c.guard("krein/" + tag + "/neumann/condition", "Neumann special case gives gamma_N u = 0", [&] {
    const Ext nm(ext::ExtensionSpec::general(double(conv.bc) * -b.dtn(z0)).at(z0), b);
    const auto u = ext::apply_resolvent(nm, real_z.front(), probes.front());
    c.add("krein/" + tag + "/neumann/condition", "Neumann special case L = -M(z0) gives gamma_N u = 0",
          la::norm(b.gamma_n(u), w) / model::field_norm(b, u), 1e-9,
          conv.bc > 0 ? "tau + L gamma = 0" : "tau = L gamma");
  });
  c.guard("krein/" + tag + "/neumann/mfunc_is_ntd", "Neumann case: M^D(z) = ntd(z + z0)", [&] {
    const Ext nm(ext::ExtensionSpec::neumann().at(z0), b);
    const cplx z = -1.0 - z0;
    const CMat m = ext::weyl_function(nm, z);
    c.add("krein/" + tag + "/neumann/mfunc_is_ntd", "Neumann case: M^D(z) = ntd(z + z0)",
          detail::rel(la::op_norm(m - b.ntd(z + z0), w), la::op_norm(m, w)), 1e-9);
  });
  c.guard("krein/" + tag + "/krein/condition", "Krein case: tau_N(z0) u = 0", [&] {
    const Ext k(ext::ExtensionSpec::krein().at(z0), b);
    const auto u = ext::apply_resolvent(k, real_z.front(), probes.front());
    c.add("krein/" + tag + "/krein/condition", "Krein case: tau_N(z0) u = 0",
          la::norm(traces::tau_N(b, z0, u), w) / model::field_norm(b, u), 1e-9);
  });
  c.guard("krein/" + tag + "/robin/condition", "Robin(I) case: gamma_N u + gamma_D u = 0", [&] {
    const Ext r(ext::ExtensionSpec::robin(CMat::Identity(n, n)).at(z0), b);
    const auto u = ext::apply_resolvent(r, real_z.front(), probes.front());
    c.add("krein/" + tag + "/robin/condition", "Robin(I) case: gamma_N u + gamma_D u = 0",
          la::norm(b.gamma_n(u) + b.gamma_d(u), w) / model::field_norm(b, u), 1e-9);
  });
  c.guard("krein/" + tag + "/adjoint_relation", "[tau_N R_D(conj w)]^* c = -P_w c", [&] {
    CVec cc(n);
    for (int i = 0; i < n; ++i) cc[i] = cplx(1.0 / (1 + i), 0.5 - 0.1 * i);
    c.add("krein/" + tag + "/adjoint_relation", "[tau_N R_D(conj w)]^* c = -P_w c",
          krein::adjoint_relation_defect(b, z0, cplx(-0.3, 0.8), probes.front(), cc), 1e-10);
  });
  // Neumann-reference factory at z0 = -1 (0 is a Neumann eigenvalue): the Krein case
  // agrees with the Dirichlet-reference one.
  const double zn = -1.0;
  c.guard("krein/" + tag + "/neumann_reference/krein_agrees", "Krein extension from both reference factories", [&] {
    const Ext kd(ext::ExtensionSpec::krein().at(zn), b);
    const auto kn = ext::make_extension_neumann_ref(ext::ExtensionSpec::krein().at(zn), b);
    double worst = 0.0;
    for (const auto& f : probes)
      worst = std::max(worst, krein::relative_gap(b, ext::apply_resolvent(kn, -2.0, f), ext::apply_resolvent(kd, -2.0, f)));
    c.add("krein/" + tag + "/neumann_reference/krein_agrees", "Krein extension from both reference factories", worst,
          1e-8);
  });
  c.guard("krein/" + tag + "/neumann_reference/special_cases", "Neumann-reference Neumann and Dirichlet cases", [&] {
    const auto nn = ext::make_extension_neumann_ref(ext::ExtensionSpec::neumann().at(zn), b);
    const auto nd = ext::make_extension_neumann_ref(ext::ExtensionSpec::dirichlet().at(zn), b);
    double worst = 0.0;
    for (const auto& f : probes) {
      worst = std::max(worst, krein::relative_gap(b, ext::apply_resolvent(nn, -2.0, f), model::neumann_resolvent(b, -2.0 + zn, f)));
      worst = std::max(worst, krein::relative_gap(b, ext::apply_resolvent(nd, -2.0, f), model::dirichlet_resolvent(b, -2.0 + zn, f)));
    }
    c.add("krein/" + tag + "/neumann_reference/special_cases", "Neumann-reference Neumann and Dirichlet cases", worst,
          1e-8);
  });
  // Transfer between Krein and Neumann
  c.guard("krein/" + tag + "/transfer/resolvent_relation", "two-extension transfer against direct solves", [&] {
    const CMat l1 = CMat::Zero(n, n), l2 = -b.dtn(z0);
    const auto r = krein::two_extension_transfer(b, l1, l2, z0, -1.0, probes);
    const double res = conv.transfer == krein::TransferForm::minus_l ? r.residual_minus_l : r.residual_plus_l;
    const std::string form(krein::transfer_form_name(conv.transfer));
    c.add("krein/" + tag + "/transfer/resolvent_relation", "two-extension transfer against direct solves", res, tol, form);
    const CMat t = krein::transfer_operator(b, l1, l2, z0, -1.0, conv.transfer);
    const CMat alt = krein::transfer_operator_alternative(b, l1, l2, z0, -1.0);
    c.add("krein/" + tag + "/transfer/alternative_form", "transfer operator = M1^{-1} (M2 - M1) M1^{-1}",
          detail::rel(la::op_norm(t - alt, w), std::max(1.0, la::op_norm(alt, w))), 1e-9, form);
    c.add("krein/" + tag + "/transfer/equal_operators", "L1 = L2 gives the zero transfer",
          la::op_norm(krein::transfer_operator(b, l2, l2, z0, -1.0, conv.transfer), w), 1e-14, form);
    for (const cplx z : {cplx(0.5, 1.0), cplx(-2.0, 0.3)}) {
      const CMat a = krein::transfer_operator(b, l1, rl, z0, z, conv.transfer);
      const CMat bb = krein::transfer_operator(b, l1, rl, z0, std::conj(z), conv.transfer);
      c.add("krein/" + tag + "/transfer/symmetry" + detail::at(z),
            "transfer(z)^* = transfer(conj z)",
            detail::rel(la::op_norm(la::adjoint(a, w) - bb, w), std::max(1.0, la::op_norm(a, w))), 1e-9, form);
    }
  });
}

inline void krein_interval(detail::Collector& c, const Conventions& conv, std::mt19937_64& rng) {
  const IntervalModel m;
  const std::vector<IntervalField> probes{IntervalField::sine(pi), IntervalField::constant(1.0),
                                          IntervalField::polynomial({0.0, 1.0, -3.0, 1.0})};
  krein_field_checks(c, m, conv, "interval", 0.0, {cplx(-1.0), cplx(-5.0)}, probes, 1e-9, rng);
  using Ext = ext::Extension<IntervalModel>;
  // Nonnegativity
  c.guard("krein/interval/nonnegativity/krein", "Krein extension is nonnegative", [&] {
    const auto r = ext::is_nonnegative(Ext(ext::ExtensionSpec::krein().at(0.0), m));
    c.add_bool("krein/interval/nonnegativity/krein", "Krein extension is nonnegative (Ritz certificate)",
               r.min_ritz_value, ext::nonnegativity_floor, r.nonnegative && r.min_ritz_value >= ext::nonnegativity_floor);
  });
  c.guard("krein/interval/nonnegativity/negative_l", "L = -I at z0 = -1 has a negative direction", [&] {
    const auto r = ext::is_nonnegative(Ext(ext::ExtensionSpec::general(-CMat::Identity(2, 2)).at(-1.0), m));
    c.add_bool("krein/interval/nonnegativity/negative_l", "L = -I at z0 = -1 has a negative direction",
               r.min_ritz_value, ext::nonnegativity_floor,
               !r.nonnegative && r.min_ritz_value < ext::nonnegativity_floor);
  });
  // Ordering of resolvents
  c.guard("krein/interval/ordering/robin1", "G_D <= G_Robin <= G_K at a = 1", [&] {
    const auto r = spectral::ordering_check(Ext(ext::ExtensionSpec::robin(CMat::Identity(2, 2)).at(0.0), m), 1.0, 40);
    c.add("krein/interval/ordering/robin1", "G_D <= G_Robin(1) <= G_K at a = 1, 40 trial functions",
          std::max(0.0, -std::min(r.min_lower_gap, r.min_upper_gap)), 1e-9);
  });
  for (int j = 0; j < 3; ++j) {
    const CMat l = detail::random_nonnegative(2, rng, 2.0);
    const std::string id = "krein/interval/ordering/random_nonnegative_l" + std::to_string(j);
    c.guard(id, "G_D <= G_ext <= G_K for L >= 0", [&] {
      const auto r = spectral::ordering_check(Ext(ext::ExtensionSpec::general(l).at(0.0), m), 1.0, 40);
      c.add(id, "G_D <= G_ext <= G_K at a = 1 for random L >= 0",
            std::max(0.0, -std::min(r.min_lower_gap, r.min_upper_gap)), 1e-9);
    });
  }
  // Spectrum
  c.guard("krein/interval/spectrum/determinant_vs_shooting", "Krein eigenvalues: boundary determinant vs shooting", [&] {
    const auto ev = spectral::values(spectral::eigenvalues(Ext(ext::ExtensionSpec::krein().at(0.0), m), 1.0, 200.0));
    const auto sh = spectral::interval_krein_shooting(1.0, 200.0);
    double worst = ev.size() == sh.size() ? 0.0 : INFINITY;
    for (std::size_t i = 0; i < std::min(ev.size(), sh.size()); ++i) worst = std::max(worst, std::abs(ev[i] - sh[i]) / sh[i]);
    c.add("krein/interval/spectrum/determinant_vs_shooting", "Krein eigenvalues: boundary determinant vs shooting",
          worst, 1e-8);
  });
  c.guard("krein/interval/spectrum/pole_duality", "bracket degenerates at Krein eigenvalues", [&] {
    const Ext k(ext::ExtensionSpec::krein().at(0.0), m);
    double worst = 0.0;
    for (double lam : spectral::values(spectral::eigenvalues(k, 1.0, 200.0))) {
      const double s = std::sqrt(lam) / pi;
      if (std::abs(s - std::round(s)) < 1e-6) continue;  // shared with the Dirichlet spectrum
      worst = std::max(worst, spectral::detail::rank_ratio(ext::bracket(k, lam)));
    }
    c.add("krein/interval/spectrum/pole_duality", "bracket degenerates at Krein eigenvalues", worst, 1e-6);
  });
  c.add("krein/interval/spectrum/kernel", "-u'' = 0 and tau_N(0) u = 0 for u in {1, x}", abstract::krein_kernel_defect(),
        1e-10);
  c.guard("krein/interval/spectrum/monotone_in_l", "eigenvalues increase with L", [&] {
    const CMat l0 = -m.dtn(0.0) + CMat::Identity(2, 2);
    auto eig = [&](double eps) {
      return spectral::values(
          spectral::eigenvalues(Ext(ext::ExtensionSpec::general(l0 + eps * CMat::Identity(2, 2)).at(0.0), m), 0.5, 100.0));
    };
    const auto lo = eig(-1e-3), mid = eig(0.0), hi = eig(1e-3);
    double bad = lo.size() == mid.size() && mid.size() == hi.size() ? 0.0 : 1.0;
    for (std::size_t i = 0; bad == 0.0 && i < mid.size(); ++i) bad += (lo[i] < mid[i] && mid[i] < hi[i]) ? 0.0 : 1.0;
    c.add("krein/interval/spectrum/monotone_in_l", "eigenvalues increase strictly with L -> L + eps I", bad, 0.0);
  });
}

inline void krein_disk(detail::Collector& c, const Conventions& conv, std::mt19937_64& rng) {
  const DiskModel m(1.0, 8);
  const int k = m.cutoff();
  const std::vector<DiskField> probes{DiskField::mode(k, 0, {1.0}),
                                      DiskField::mode(k, 1, {0.0, 1.0}) + DiskField::mode(k, -3, {0.5}),
                                      DiskField::mode(k, 2, {1.0, -1.0})};
  krein_field_checks(c, m, conv, "disk_fourier_bessel", -1.0, {cplx(-2.0)}, probes, 1e-7, rng);
  c.guard("krein/disk_fourier_bessel/krein/kernel_dimension", "Krein kernel: one harmonic per mode", [&] {
    const ext::Extension<DiskModel> e(ext::ExtensionSpec::krein().at(-1.0), m);
    const int n = m.boundary_dim();
    const auto [a, unused] = ext::boundary_system(e, -1.0, CVec::Zero(n), CVec::Zero(n));
    const auto t = m.harmonic_traces(-1.0);
    Eigen::JacobiSVD<CMat> svd(a);
    int nullity = 0;
    for (double s : svd.singularValues()) nullity += s <= 1e-10 * std::max(1.0, la::op_norm(t.neu));
    c.add("krein/disk_fourier_bessel/krein/kernel_dimension", "Krein kernel dimension = 2K + 1",
          std::abs(double(nullity - n)), 0.0);
  });
}

inline void krein_kite(detail::Collector& c, const Options& opt, const Conventions& conv, std::mt19937_64& rng) {
  const auto g = geometry::make_grid(geometry::CurveSpec::kite(), opt.nodes);
  const BemBackend b(g);
  const double z0 = -1.0;
  using Ext = ext::Extension<BemBackend>;
  const CMat rl = detail::random_resolved_hermitian(g, rng);
  std::vector<std::pair<std::string, Ext>> exts{{"krein", Ext(ext::ExtensionSpec::krein().at(z0), b)},
                                                {"random_l", Ext(ext::ExtensionSpec::general(rl).at(z0), b)}};
  const auto grid = krein::herglotz_grid();
  for (const auto& [name, e] : exts) {
    const std::string p = "krein/kite/" + name + "/";
    for (const cplx z : {cplx(2.0, 3.0), cplx(-1.0, 0.5)}) {
      const std::string id = p + "mfunc_symmetry" + detail::at(z);
      c.guard(id, "M^D(z)^* = M^D(conj z)", [&] {
        const CMat a = ext::weyl_function(e, z), bb = ext::weyl_function(e, std::conj(z));
        const CMat q = weyl::resolved_frame(g);
        c.add(id, "M^D(z)^* = M^D(conj z) on resolved modes, relative",
              detail::rel(weyl::resolved_symmetry_defect(g, a, bb), la::op_norm(weyl::compress(g, q, a))), 1e-9);
      });
    }
    c.guard(p + "herglotz", "Im M^D >= 0 on the upper half plane grid", [&] {
      double worst = -INFINITY;
      for (const cplx z : grid) worst = std::max(worst, -weyl::resolved_imag_part_eigs(g, ext::weyl_function(e, z)).minCoeff());
      c.add(p + "herglotz", "Im M^D >= 0 on a 20-point upper half plane grid, resolved modes", std::max(0.0, worst),
            1e-10);
    });
  }
  c.guard("krein/kite/transfer/symmetry", "transfer(z)^* = transfer(conj z)", [&] {
    const CMat l1 = CMat::Zero(g.n, g.n);
    const cplx z(0.5, 1.0);
    const CMat a = krein::transfer_operator(b, l1, rl, z0, z, conv.transfer);
    const CMat bb = krein::transfer_operator(b, l1, rl, z0, std::conj(z), conv.transfer);
    const CMat q = weyl::resolved_frame(g);
    c.add("krein/kite/transfer/symmetry", "transfer(z)^* = transfer(conj z) on resolved modes, relative",
          detail::rel(weyl::resolved_symmetry_defect(g, a, bb), std::max(1.0, la::op_norm(weyl::compress(g, q, a)))), 1e-9,
          std::string(krein::transfer_form_name(conv.transfer)));
  });
  c.guard("krein/kite/neumann/boundary_condition", "Neumann special case on layer fields", [&] {
    const Ext nm(ext::ExtensionSpec::neumann().at(z0), b);
    CVec gdat(g.n);
    for (int j = 0; j < g.n; ++j) gdat[j] = std::cos(2.0 * g.t[j]);
    // A z-harmonic field with vanishing Neumann trace has zero Neumann-case residual.
    const auto u = weyl::solve_neumann(g, cplx(0.3, 1.0), CVec::Zero(g.n));
    const auto v = weyl::solve_neumann(g, cplx(0.3, 1.0), gdat);
    c.add("krein/kite/neumann/boundary_condition", "Neumann special case residual equals |gamma_N u|",
          std::abs(ext::boundary_residual(nm, v) - la::norm(v.trace_n, g.measure())) + ext::boundary_residual(nm, u), 1e-8);
  });
}

// --- abstract theory on the interval ------------------------------------------

inline void abstract_interval(detail::Collector& c) {
  const abstract::Abstract1D a;
  using abstract::Realization;
  const auto [np, nm] = a.deficiency_indices();
  c.add("abstract/deficiency_indices", "dim ker(S* - i) = dim ker(S* + i) = 2", std::abs(np - 2) + std::abs(nm - 2), 0.0);
  c.add("abstract/deficiency_defining_property", "(n, (S* - i) n) = 0 on N_+", a.deficiency_defect(), 1e-10);
  {
    Eigen::SelfAdjointEigenSolver<CMat> es(a.plus().gram, Eigen::EigenvaluesOnly);
    c.add_bool("abstract/deficiency_gram_positive", "Gram matrix of N_+ is Hermitian positive definite",
               es.eigenvalues().minCoeff(), 0.0,
               la::op_norm(CMat(a.plus().gram - a.plus().gram.adjoint())) <= 1e-14 && es.eigenvalues().minCoeff() > 0.0);
  }
  for (auto r : {Realization::friedrichs, Realization::krein}) {
    const std::string nm2 = r == Realization::friedrichs ? "friedrichs" : "krein";
    c.add("abstract/" + nm2 + "/donoghue_symmetry@2,3", "M(z)^* = M(conj z)", a.donoghue_symmetry_defect(r, {2.0, 3.0}),
          1e-8);
    c.add("abstract/" + nm2 + "/donoghue_at_i", "M(i) = i I", detail::max_abs(a.donoghue_m(r, I) - I * CMat::Identity(2, 2)),
          1e-12);
    const CMat mi = a.donoghue_m(r, cplx(0.3, 1.7));
    Eigen::SelfAdjointEigenSolver<CMat> es((mi - mi.adjoint()) / (2.0 * I), Eigen::EigenvaluesOnly);
    c.add("abstract/" + nm2 + "/donoghue_herglotz", "Im M(z) >= 0 for Im z > 0", std::max(0.0, -es.eigenvalues().minCoeff()),
          1e-10);
    c.add("abstract/" + nm2 + "/cayley_maps_deficiency", "Cayley transform maps N_- into N_+", a.cayley_defect(r), 1e-9);
  }
  const auto tests = abstract::abstract_test_functions();
  for (const cplx z : {cplx(-1.0), cplx(2.0, 3.0), I}) {
    const std::string id = "abstract/krein_minus_friedrichs" + detail::at(z);
    c.guard(id, "Krein formula for S_K - S_F via the Donoghue function",
            [&] { c.add(id, "Krein formula for S_K - S_F via the Donoghue function", a.krein_formula_residual(z, tests), 1e-6); });
  }
  c.add("abstract/friedrichs_is_dirichlet", "Friedrichs extension = Dirichlet realization",
        abstract::friedrichs_dirichlet_gap(-1.0, IntervalField::sine(pi) + IntervalField::constant(1.0)), 1e-8);
  double split = 0.0;
  for (const auto& u : tests) split = std::max(split, abstract::adjoint_domain_split_defect(u));
  c.add("abstract/adjoint_domain_split", "dom(S*) = dom(S) + S_F^{-1} ker(S*) + ker(S*)", split, 1e-9);
  c.add("abstract/krein_kernel", "ker(S_K) = span{1, x}", abstract::krein_kernel_defect(), 1e-10);
  c.add("abstract/parametrization/member", "domain members of S_{B,W}, B = I", abstract::alonso_simon_member_defect(1.0),
        1e-9);
  c.add("abstract/parametrization/operator_is_gram", "boundary operator of S_{B,W} = b Gram(ker S*)",
        detail::max_abs(abstract::alonso_simon_operator(1.0) - abstract::alonso_simon_gram(1.0)), 1e-12);
  c.add("abstract/parametrization/zero_is_krein", "B = 0 reproduces the Krein extension",
        detail::max_abs(abstract::alonso_simon_operator(0.0)), 0.0);
  c.guard("abstract/parametrization/ordering", "S_K <= S_{B,W} <= S_F", [&] {
    const ext::Extension<IntervalModel> e(ext::ExtensionSpec::general(abstract::alonso_simon_operator(1.0)).at(0.0),
                                          IntervalModel());
    const auto r = spectral::ordering_check(e, 1.0, 20);
    c.add("abstract/parametrization/ordering", "S_K <= S_{B,W} <= S_F on 20 trial functions",
          std::max(0.0, -std::min(r.min_lower_gap, r.min_upper_gap)), 1e-9);
  });
  // orthogonality of z-harmonic fields to the range of the minimal operator
  const IntervalModel m;
  double orth = 0.0;
  const IntervalField phi = IntervalField::polynomial({0.0, 0.0, 1.0, -2.0, 1.0});
  for (const double z : {-2.0, 3.0}) {
    const auto img = m.apply_op(phi, z);
    for (const auto& h : m.harmonic_basis(z)) orth = std::max(orth, std::abs(m.inner(img, h)));
  }
  c.add("abstract/harmonic_orthogonal_to_minimal_range", "(h, (-Delta - z) phi) = 0", orth, 1e-10);
}

}  // namespace suites

inline Report run(Suite suite, Target target, const Options& opt = {}) {
  Report r;
  r.suite = suite;
  r.target = target;
  r.seed = opt.seed;
  for (const auto& id : opt.inject)
    if (std::find(ledger_identities().begin(), ledger_identities().end(), id) == ledger_identities().end())
      throw Error(Errc::spec_invalid, "unknown ledger identity '" + id + "'");
  r.ledger = build_ledger(opt.inject, r.conventions);
  const Conventions& conv = r.conventions;
  detail::Collector c(opt.tol_scale);
  std::mt19937_64 rng(opt.seed);
  auto want = [&](Suite s) { return suite == Suite::all || suite == s; };
  if (want(Suite::weyl)) {
    if (target == Target::interval) suites::weyl_interval(c, conv);
    if (target == Target::disk) suites::weyl_disk(c, conv, opt);
    if (target == Target::kite) suites::weyl_kite(c, conv, opt);
  }
  if (want(Suite::traces)) {
    if (target == Target::interval) suites::traces_interval(c);
    if (target == Target::disk) suites::traces_disk(c);
    if (target == Target::kite) suites::traces_kite(c, opt);
  }
  if (want(Suite::krein)) {
    if (target == Target::interval) suites::krein_interval(c, conv, rng);
    if (target == Target::disk) suites::krein_disk(c, conv, rng);
    if (target == Target::kite) suites::krein_kite(c, opt, conv, rng);
  }
  if (want(Suite::abstract) && target == Target::interval) suites::abstract_interval(c);
  r.checks = c.take();
  std::stable_sort(r.checks.begin(), r.checks.end(),
                   [](const CheckResult& a, const CheckResult& b) { return a.identity < b.identity; });
  return r;
}

}  // namespace kreinlab::verify
