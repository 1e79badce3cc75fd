#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "kreinlab/kreinformulas.hpp"
#include "kreinlab/spectral.hpp"
#include "kreinlab/verify.hpp"

using namespace kreinlab;
using ext::ExtensionSpec;
using oracles::DiskField;
using oracles::DiskModel;
using oracles::IntervalField;
using oracles::IntervalModel;

namespace {

IntervalField poly(std::vector<cplx> c) { return IntervalField::polynomial(std::move(c)); }

template <class B>
double distance(const B& b, const typename B::Field& u, const typename B::Field& v) {
  return model::field_norm(b, u + (-1.0) * v);
}

double op_norm(const CMat& a, const RVec& w) { return la::op_norm(a, w); }

}  // namespace

TEST_CASE("boundary Weyl function of the special cases") {
  const IntervalModel b;
  const cplx z(0.5, 2.0);
  const auto krein = ext::make_extension(ExtensionSpec::krein(), b);
  const auto md = krein::mfunc(krein, z);
  CHECK(md.role == layerpot::Role::MD);
  CHECK(op_norm(md.matrix - (b.dtn(0.0) - b.dtn(z)).inverse(), b.metric()) <= 1e-12);
  // Neumann: [-M(z + z0)]^{-1} = ntd(z + z0) at z + z0 = -1
  const auto neumann = ext::make_extension(ExtensionSpec::neumann(), b);
  CHECK(op_norm(krein::mfunc(neumann, -1.0).matrix - b.ntd(-1.0), b.metric()) <= 1e-12);
  const auto dir = ext::make_extension(ExtensionSpec::dirichlet(), b);
  CHECK(krein::mfunc(dir, z).matrix.norm() == 0.0);
}

TEST_CASE("bracket inverse agrees with the trace definition") {
  std::mt19937_64 rng(2);
  const IntervalModel ib;
  for (const auto& s : {ExtensionSpec::krein(), ExtensionSpec::neumann(),
                        ExtensionSpec::general(verify::detail::random_hermitian(2, rng))}) {
    const auto e = ext::make_extension(s, ib);
    for (cplx z : {cplx(2.0, 3.0), cplx(-1.5, 0.0)})
      CHECK(op_norm(krein::mfunc_trace(e, z) - krein::mfunc(e, z).matrix, e.metric()) <= 1e-8);
  }
  const DiskModel db(1.0, 6);
  const auto e = ext::make_extension(ExtensionSpec::general(verify::detail::random_hermitian(13, rng)), db);
  const cplx z(1.0, 0.5);
  CHECK(op_norm(krein::mfunc_trace(e, z) - krein::mfunc(e, z).matrix, e.metric()) <= 1e-7);
  // proper subspace: M^D lives on ran(P)
  CMat p = CMat::Zero(13, 13);
  for (int k = 4; k < 9; ++k) p(k, k) = 1.0;
  const auto ep = ext::make_extension(ExtensionSpec::general(CMat::Zero(13, 13)).restricted_to(p), db);
  const CMat m = krein::mfunc(ep, z).matrix;
  CHECK(op_norm(m - p * m * p, ep.metric()) == 0.0);
  CHECK(op_norm(krein::mfunc_trace(ep, z) - m, ep.metric()) <= 1e-7);
}

TEST_CASE("M^D symmetry") {
  std::mt19937_64 rng(4);
  const IntervalModel ib;
  const cplx z(2.0, 3.0);
  CHECK(krein::mfunc_symmetry_defect(ext::make_extension(ExtensionSpec::krein(), ib), z) <= 1e-9);
  CHECK(krein::mfunc_symmetry_defect(
            ext::make_extension(ExtensionSpec::general(verify::detail::random_hermitian(2, rng)), ib), z) <= 1e-9);
  const DiskModel db(1.3, 8);
  CHECK(krein::mfunc_symmetry_defect(ext::make_extension(ExtensionSpec::robin(CMat::Identity(17, 17)), db), z) <=
        1e-9);
}

TEST_CASE("Herglotz property") {
  std::mt19937_64 rng(6);
  const IntervalModel ib;
  const auto krein = ext::make_extension(ExtensionSpec::krein(), ib);
  const cplx pts[] = {cplx(0.0, 1.0), cplx(1.0, 1.0), cplx(-2.0, 0.5)};
  CHECK(krein::herglotz_defect(krein, pts) <= 1e-10);
  CHECK(krein::herglotz_defect(krein, krein::herglotz_grid()) <= 1e-10);
  const DiskModel db(1.0, 8);
  const auto e = ext::make_extension(ExtensionSpec::general(verify::detail::random_hermitian(17, rng)), db);
  CHECK(krein::herglotz_defect(e, krein::herglotz_grid()) <= 1e-9);
  // lower half plane mirrors the upper one
  for (cplx z : pts) {
    RVec up = la::imag_part_eigs(ext::weyl_function(krein, z), krein.metric());
    RVec lo = la::imag_part_eigs(ext::weyl_function(krein, std::conj(z)), krein.metric());
    std::sort(up.begin(), up.end());
    std::sort(lo.begin(), lo.end(), std::greater<>());
    CHECK((up + lo).cwiseAbs().maxCoeff() <= 1e-10);
  }
  const cplx below[] = {cplx(0.0, -1.0)};
  CHECK_THROWS_AS(krein::herglotz_defect(krein, below), Error);
}

TEST_CASE("Krein resolvent formula against the direct boundary solve") {
  const IntervalModel ib;
  const auto krein = ext::make_extension(ExtensionSpec::krein(), ib);
  const auto f = IntervalField::sine(pi);
  const auto rhs = krein::krein_resolvent_rhs(krein, -1.0, f);
  CHECK(distance(ib, rhs, ext::direct_resolvent(krein, -1.0, f)) <= 1e-9);
  CHECK(distance(ib, ib.apply_op(rhs, -1.0), f) <= 1e-9);
  CHECK(ext::boundary_residual(krein, rhs) <= 1e-9);

  const auto dir = ext::make_extension(ExtensionSpec::dirichlet(), ib);
  CHECK(distance(ib, krein::krein_resolvent_rhs(dir, -1.0, f), model::dirichlet_resolvent(ib, -1.0, f)) == 0.0);

  std::mt19937_64 rng(8);
  const DiskModel db(1.0, 6);
  const auto e = ext::make_extension(ExtensionSpec::general(verify::detail::random_hermitian(13, rng)), db);
  const auto g = DiskField::mode(6, 2, {1.0, 0.3}) + DiskField::mode(6, 0, {0.5, -1.0});
  for (cplx z : {cplx(0.0, 1.0), cplx(-3.0, 0.0)}) {
    const auto u = krein::krein_resolvent_rhs(e, z, g), v = ext::direct_resolvent(e, z, g);
    CHECK(krein::relative_gap(db, u, v) <= 1e-7);
  }
}

TEST_CASE("sign tests select exactly one candidate") {
  const IntervalModel ib;
  const auto krein = ext::make_extension(ExtensionSpec::krein(), ib);
  const auto f = IntervalField::sine(pi);
  const auto k = krein::krein_formula_sign_test(krein, -1.0, f);
  CHECK(k.validated_sign == +1);
  CHECK(k.residual_plus <= 1e-9);
  CHECK(k.residual_minus > 1e-3);
  const auto o = krein::one_sided_sign_test(krein, -1.0, f);
  CHECK(o.validated_sign == -1);
  CHECK(o.residual_minus <= 1e-9);
  CHECK(o.residual_plus > 1e-3);
}

TEST_CASE("adjoint of the regularized trace of the Dirichlet resolvent") {
  const IntervalModel ib;
  for (cplx w : {cplx(-1.0), cplx(2.0, 1.0)})
    CHECK(krein::adjoint_relation_defect(ib, 0.0, w, poly({1.0, 0.0, 3.0}), CVec{{0.5, cplx(0.0, 1.0)}}) <= 1e-10);
  const DiskModel db(1.0, 4);
  CVec c(9);
  for (int i = 0; i < 9; ++i) c[i] = cplx(1.0 / (i + 1), i % 3);
  CHECK(krein::adjoint_relation_defect(db, -1.0, cplx(1.0, 1.0), DiskField::mode(4, 1, {1.0, 1.0}), c) <= 1e-9);
}

TEST_CASE("two-extension transfer operator") {
  const IntervalModel ib;
  const CMat l = CMat{{1.0, 0.5}, {0.5, 2.0}};
  const std::vector<IntervalField> probes{IntervalField::constant(1.0), poly({0.0, 1.0, 1.0})};
  for (auto form : {krein::TransferForm::minus_l, krein::TransferForm::plus_l})
    CHECK(krein::transfer_operator(ib, l, l, -1.0, cplx(0.5, 1.0), form).norm() == 0.0);

  // Krein to Neumann at z0 = -1, z = -1: R_N(-2) 1 = 1/2
  const CMat l1 = CMat::Zero(2, 2), l2 = -ib.dtn(-1.0);
  const auto t = krein::two_extension_transfer(ib, l1, l2, -1.0, -1.0, {IntervalField::constant(1.0)});
  CHECK(t.form == krein::TransferForm::minus_l);
  CHECK(t.residual_minus_l <= 1e-9);
  CHECK(t.residual_plus_l > 1e-3);
  CHECK(t.alternative_defect <= 1e-8);
  const ext::Extension<IntervalModel> ek(ExtensionSpec::krein().at(-1.0), ib);
  const auto rk = ext::direct_resolvent(ek, -1.0, IntervalField::constant(1.0));
  const auto r2 = rk + krein::adjoint_trace_resolvent(ek, -1.0, t.op * ib.gamma_d(rk));
  CHECK(distance(ib, r2, IntervalField::constant(0.5)) <= 1e-9);

  // symmetry T(z)^* = T(conj z)
  const cplx z(0.7, 1.3);
  const CMat a = krein::transfer_operator(ib, l1, l, -1.0, z, krein::TransferForm::minus_l);
  const CMat b = krein::transfer_operator(ib, l1, l, -1.0, std::conj(z), krein::TransferForm::minus_l);
  CHECK(op_norm(la::adjoint(a, ib.metric()) - b, ib.metric()) <= 1e-9);
  const auto tr = krein::two_extension_transfer(ib, l1, l, -1.0, z, probes);
  CHECK(tr.residual_minus_l <= 1e-9);
  CHECK(tr.alternative_defect <= 1e-8);
}

TEST_CASE("smoothing factorization") {
  std::mt19937_64 rng(9);
  const IntervalModel ib;
  const cplx z(1.0, 1.0);
  CHECK(krein::smoothing_factorization_check(ext::make_extension(ExtensionSpec::krein(), ib), z) <= 1e-10);
  CHECK(krein::smoothing_factorization_check(ext::make_extension(ExtensionSpec::neumann(), ib), z) <= 1e-9);
  CHECK(krein::smoothing_factorization_check(
            ext::make_extension(ExtensionSpec::general(verify::detail::random_hermitian(2, rng)), ib), z) <= 1e-8);
  const DiskModel db(1.0, 6);
  CHECK(krein::smoothing_factorization_check(
            ext::make_extension(ExtensionSpec::general(verify::detail::random_hermitian(13, rng)), db), z) <= 1e-8);
}

TEST_CASE("bracket zeros are the extension eigenvalues") {
  std::mt19937_64 rng(12);
  const IntervalModel ib;
  auto det = [](const auto& e, double lambda) { return ext::bracket(e, lambda - e.z0()).determinant().real(); };
  const auto krein = ext::make_extension(ExtensionSpec::krein(), ib);
  const auto evs = spectral::values(spectral::eigenvalues(krein, 60.0, 85.0));
  REQUIRE(evs.size() == 1);
  // s^2 with tan(s/2) = s/2, from the oracle script
  CHECK(std::abs(evs[0] - 80.762914225706519898) <= 1e-6 * 80.8);
  CHECK(det(krein, evs[0] * (1 - 1e-6)) * det(krein, evs[0] * (1 + 1e-6)) < 0.0);

  const auto e = ext::make_extension(ExtensionSpec::general(verify::detail::random_nonnegative(2, rng)), ib);
  const auto found = spectral::values(spectral::eigenvalues(e, 0.5, 60.0));
  CHECK(!found.empty());
  for (double lam : found) {
    INFO("lambda = " << lam);
    CHECK(det(e, lam * (1 - 1e-6)) * det(e, lam * (1 + 1e-6)) < 0.0);
  }
}

TEST_CASE("sign ledger") {
  verify::Conventions conv;
  const auto ledger = verify::build_ledger({}, conv);
  CHECK(ledger.entries().size() == verify::ledger_identities().size());
  for (std::size_t i = 0; i < ledger.entries().size(); ++i) {
    const auto& e = ledger.entries()[i];
    INFO(e.identity);
    if (e.identity == "ntd_sign") {
      CHECK(e.validated_sign == ">= 0 for z < 0");
      CHECK(e.validated_sign != e.printed_sign);
    }
    CHECK(e.consistent());
    CHECK(ledger.reproduce(i));
  }
  CHECK(ledger.consistent());
  CHECK(conv.jump == +1);
  CHECK(conv.one_sided == -1);
  CHECK(conv.krein == +1);
  CHECK(conv.bc == +1);
  CHECK(conv.transfer == krein::TransferForm::minus_l);

  verify::Conventions flipped;
  const auto bad = verify::build_ledger({"krein_resolvent_formula"}, flipped);
  CHECK_FALSE(bad.consistent());
  CHECK(flipped.krein == -1);
  for (const auto& e : bad.entries()) CHECK(e.consistent() == (e.identity != "krein_resolvent_formula"));
}
