#include <catch_amalgamated.hpp>

#include <cmath>

#include "kreinlab/abstract1d.hpp"
#include "kreinlab/spectral.hpp"

using namespace kreinlab;
using abstract::Abstract1D;
using abstract::Realization;
using oracles::IntervalField;

namespace {

const Abstract1D& shared() {
  static const Abstract1D m;
  return m;
}

}  // namespace

TEST_CASE("deficiency spaces") {
  const auto& m = shared();
  CHECK(m.deficiency_indices() == std::pair<int, int>{2, 2});
  for (const auto* d : {&m.plus(), &m.minus()}) {
    CHECK((d->gram - d->gram.adjoint()).norm() <= 1e-14);
    Eigen::SelfAdjointEigenSolver<CMat> es(d->gram);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    // orthonormal basis
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(std::abs(m.model().inner(d->basis[j], d->basis[i]) - (i == j ? 1.0 : 0.0)) <= 1e-12);
  }
  CHECK(m.deficiency_defect() <= 1e-12);
  // members of N_+ solve -u'' = i u
  for (const auto& n : m.plus().raw) CHECK(model::field_norm(m.model(), m.model().apply_op(n, I)) <= 1e-12);
  for (const auto& n : m.minus().raw) CHECK(model::field_norm(m.model(), m.model().apply_op(n, -I)) <= 1e-12);
}

TEST_CASE("Donoghue Weyl function") {
  const auto& m = shared();
  for (auto r : {Realization::friedrichs, Realization::krein}) {
    // at z = i the factor 1 + z^2 vanishes
    CHECK((m.donoghue_m(r, I) - I * CMat::Identity(2, 2)).norm() <= 1e-14);
    for (cplx z : {cplx(0.5, 1.0), cplx(-3.0, 0.2), cplx(2.0, 3.0)}) {
      CHECK(m.donoghue_symmetry_defect(r, z) <= 1e-8);
      const CMat mz = m.donoghue_m(r, z);
      Eigen::SelfAdjointEigenSolver<CMat> es((mz - mz.adjoint()) / (2.0 * I), Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    }
  }
  const CMat mi = m.donoghue_m(Realization::friedrichs, I);
  Eigen::SelfAdjointEigenSolver<CMat> es((mi - mi.adjoint()) / (2.0 * I), Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() >= 0.0);
}

TEST_CASE("Krein formula linking the Friedrichs and Krein extensions") {
  const auto& m = shared();
  const auto tests = abstract::abstract_test_functions();
  CHECK(tests.size() == 5);
  for (cplx z : {cplx(-1.0), cplx(2.0, 3.0), I}) {
    INFO("z = " << z);
    CHECK(m.krein_formula_residual(z, tests) <= 1e-6);
  }
  // at a Krein eigenvalue the bracket is singular and the check reports it
  CHECK_THROWS_AS(m.krein_formula_residual(4.0 * pi * pi, tests), Error);
}

TEST_CASE("Cayley transforms map N_- into N_+") {
  const auto& m = shared();
  CHECK(m.cayley_defect(Realization::friedrichs) <= 1e-9);
  CHECK(m.cayley_defect(Realization::krein) <= 1e-9);
}

TEST_CASE("Friedrichs extension is the Dirichlet Laplacian") {
  for (cplx z : {cplx(-1.0), cplx(2.0, 1.0)}) {
    CHECK(abstract::friedrichs_dirichlet_gap(z, IntervalField::constant(1.0)) <= 1e-9);
    CHECK(abstract::friedrichs_dirichlet_gap(z, IntervalField::exponential(2.0)) <= 1e-9);
  }
  // S_F^{-1} of ker(S*) members vanishes at both ends
  const oracles::IntervalModel b;
  for (const auto& k : {IntervalField::constant(1.0), IntervalField::polynomial({0.0, 1.0})})
    CHECK(b.gamma_d(model::dirichlet_resolvent(b, 0.0, k)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("adjoint domain splits into dom(S), S_F^{-1} ker(S*) and ker(S*)") {
  for (const auto& u : {IntervalField::polynomial({1.0, 2.0, -1.0, 0.5}), IntervalField::exponential(1.5),
                        IntervalField::cosine(4.0) + IntervalField::sine(1.0)})
    CHECK(abstract::adjoint_domain_split_defect(u) <= 1e-9);
}

TEST_CASE("Krein kernel is ker(S*)") { CHECK(abstract::krein_kernel_defect() <= 1e-10); }

TEST_CASE("nonnegative extensions from W = ker(S*) and B = b I") {
  // B = 0 reproduces the Krein extension
  CHECK(abstract::alonso_simon_operator(0.0).norm() == 0.0);
  for (double b : {0.5, 1.0, 4.0}) {
    INFO("b = " << b);
    CHECK(abstract::alonso_simon_member_defect(b) <= 1e-9);
    const CMat l = abstract::alonso_simon_operator(b);
    CHECK((l - l.adjoint()).norm() <= 1e-12);
    Eigen::SelfAdjointEigenSolver<CMat> es(l, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  }
  // form ordering Friedrichs >= S_{B,W} >= Krein on 20 trial functions
  const ext::Extension<oracles::IntervalModel> e(
      ext::ExtensionSpec::general(abstract::alonso_simon_operator(1.0)).at(0.0), oracles::IntervalModel());
  const auto r = spectral::ordering_check(e, 1.0, 20);
  CHECK(r.ordered);
}
