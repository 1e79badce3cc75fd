#include <catch_amalgamated.hpp>

#include <cmath>

#include "kreinlab/oracles/disk.hpp"
#include "kreinlab/oracles/interval.hpp"
#include "kreinlab/weyl.hpp"

using namespace kreinlab;
using geometry::CurveSpec;
using geometry::make_grid;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

CVec mode(const geometry::BoundaryGrid& g, int k) {
  CVec v(g.n);
  for (int j = 0; j < g.n; ++j) v[j] = std::polar(1.0, k * g.t[j]);
  return v;
}

cplx rayleigh(const geometry::BoundaryGrid& g, const CMat& a, int k) {
  const CVec e = mode(g, k);
  const RVec w = g.measure();
  return la::pairing(a * e, e, w) / la::pairing(e, e, w);
}

Errc code_of(auto f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::bracket_singular;
}

}  // namespace

TEST_CASE("Dirichlet problem on the unit circle") {
  const auto g = make_grid(CurveSpec::circle(1.0), 64);
  CHECK_THAT(weyl::solve_dirichlet(g, 0.0, CVec::Ones(64)).value(0.0, 0.0).real(), WithinAbs(1.0, 1e-10));
  const CVec c = 0.5 * (mode(g, 1) + mode(g, -1));
  CHECK_THAT(weyl::solve_dirichlet(g, 0.0, c).value(0.3, 0.4).real(), WithinAbs(0.3, 1e-10));
  // u = J_0(r)/J_0(1); 1/J_0(1) from the oracle script
  const auto u = weyl::solve_dirichlet(g, 1.0, CVec::Ones(64));
  CHECK_THAT(u.value(0.0, 0.0).real(), WithinRel(1.3068518339335652264, 1e-10));
  CHECK(std::abs(u.laplacian(0.1, 0.2) + u.value(0.1, 0.2)) <= 1e-12);
}

TEST_CASE("Neumann problem on the unit circle at z = -1") {
  const auto g = make_grid(CurveSpec::circle(1.0), 64);
  // u = I_0(r)/I_1(1): gamma_N u = 1 gives u(0) = +1/I_1(1)
  const auto u = weyl::solve_neumann(g, -1.0, CVec::Ones(64));
  CHECK_THAT(u.value(0.0, 0.0).real(), WithinRel(1.7694132376805825857, 1e-10));
  // u = I_1(r) e^{i theta}/I_1'(1): boundary trace I_1(1)/I_1'(1)
  const auto v = weyl::solve_neumann(g, -1.0, mode(g, 1));
  const double trace = 1.4267232639744664393 / 1.7694132376805825857;
  CHECK((v.trace_d - trace * mode(g, 1)).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((v.trace_n - mode(g, 1)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("Neumann data round trip through the NtD map") {
  const auto g = make_grid(CurveSpec::kite(), 128);
  CVec data(g.n);
  for (int j = 0; j < g.n; ++j) data[j] = std::exp(std::sin(g.t[j])) * std::polar(1.0, g.t[j]);
  for (cplx z : {cplx(-1.0), cplx(2.0, 1.0)}) {
    const auto u = weyl::solve_neumann(g, z, data);
    CHECK((u.trace_d - weyl::ntd(g, z).matrix * data).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("spectral parameter guards") {
  const auto g = make_grid(CurveSpec::circle(1.3), 32);
  weyl::SpectralParameter sp(2.0);
  sp.dirichlet_distance = 0.0;
  CHECK(code_of([&] { weyl::solve_dirichlet(g, sp, CVec::Ones(32)); }) == Errc::near_singular);
  CHECK(code_of([&] { weyl::solve_neumann(g, 0.0, CVec::Ones(32)); }) == Errc::near_singular);
  // the unit circle has capacity one: V_0 is singular there
  const auto unit = make_grid(CurveSpec::circle(1.0), 32);
  CHECK_NOTHROW(weyl::dtn(unit, 0.0));
  // first Dirichlet eigenvalue of the unit disk
  CHECK(code_of([&] { weyl::dtn(unit, 5.7831859629467845212); }) == Errc::near_singular);
}

TEST_CASE("DtN on the disk of radius 1.3 at z = 0") {
  const auto g = make_grid(CurveSpec::circle(1.3), 128);
  const auto d = weyl::dtn(g, 0.0);
  CHECK(d.role == layerpot::Role::DtN);
  for (int k = -10; k <= 10; ++k) {
    CHECK_THAT(rayleigh(g, d.matrix, k).real(), WithinAbs(-std::abs(k) / 1.3, 1e-8));
    CHECK((d.matrix * mode(g, k) + std::abs(k) / 1.3 * mode(g, k)).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("unit disk mode formula") {
  const auto g = make_grid(CurveSpec::circle(1.0), 128);
  const CMat d1 = weyl::dtn(g, 1.0).matrix;
  CHECK_THAT(rayleigh(g, d1, 0).real(), WithinRel(0.5750809150043059605, 1e-10));
  for (cplx z : {cplx(-1.0), cplx(1.0), cplx(2.0, 1.0)}) {
    const CMat d = weyl::dtn(g, z).matrix;
    for (int k = -10; k <= 10; ++k) {
      INFO("z = " << z << " k = " << k);
      CHECK(std::abs(rayleigh(g, d, k) - oracles::disk_mode_dtn(k, z, 1.0)) <= 1e-8);
    }
  }
}

TEST_CASE("interval DtN and NtD closed forms") {
  const CMat d0 = oracles::interval_dtn(0.0);
  CHECK((d0 - CMat{{-1.0, 1.0}, {1.0, -1.0}}).norm() <= 1e-12);
  const double c = 1.3130352854993313036, s = 0.85091812823932154513;  // cosh1/sinh1, 1/sinh1
  const CMat d1 = oracles::interval_dtn(-1.0);
  CHECK((d1 - CMat{{-c, s}, {s, -c}}).norm() <= 1e-12);
  const CMat n1 = oracles::IntervalModel().ntd(-1.0);
  CHECK((n1 + d1.inverse()).norm() <= 1e-12);
}

TEST_CASE("NtD times DtN is minus the identity") {
  for (const auto& c : {CurveSpec::circle(1.3), CurveSpec::kite()}) {
    const auto g = make_grid(c, 128);
    for (cplx z : {cplx(-1.0), cplx(2.0, 1.0)}) {
      const CMat p = weyl::ntd(g, z).matrix * weyl::dtn(g, z).matrix + CMat::Identity(g.n, g.n);
      CHECK(la::op_norm(p, g.measure()) <= 1e-8);
    }
  }
}

TEST_CASE("DtN symmetry: adjoint at z equals the map at conj z") {
  for (cplx z : {cplx(2.0, 1.0), cplx(-3.0, 0.5)}) {
    const auto disk = make_grid(CurveSpec::circle(1.3), 128);
    const CMat a = weyl::dtn(disk, z).matrix, b = weyl::dtn(disk, std::conj(z)).matrix;
    CHECK(la::op_norm(la::adjoint(a, disk.measure()) - b, disk.measure()) <= 1e-8);
    // On the kite the nodal DtN resolves only the band |k| <= N/4 to this level.
    const auto kite = make_grid(CurveSpec::kite(), 128);
    CHECK(weyl::resolved_symmetry_defect(kite, weyl::dtn(kite, z).matrix, weyl::dtn(kite, std::conj(z)).matrix) <=
          1e-8);
  }
}

TEST_CASE("DtN is nonpositive for z <= 0") {
  const auto disk = make_grid(CurveSpec::circle(1.3), 128);
  const auto kite = make_grid(CurveSpec::kite(), 128);
  for (double z : {0.0, -1.0, -4.0}) {
    CHECK(la::hermitian_part_eigs(weyl::dtn(disk, z).matrix, disk.measure()).maxCoeff() <= 1e-10);
    CHECK(weyl::resolved_hermitian_part_eigs(kite, weyl::dtn(kite, z).matrix).maxCoeff() <= 1e-10);
  }
}

TEST_CASE("NtD on the disk at z = -1 is positive semidefinite") {
  const auto g = make_grid(CurveSpec::circle(1.0), 128);
  const RVec e = la::hermitian_part_eigs(weyl::ntd(g, -1.0).matrix, g.measure());
  CHECK(e.minCoeff() >= -1e-10);
  // the largest eigenvalue is the k = 0 mode: I_0(1)/I_1(1) > 0
  CHECK(e.maxCoeff() > 0.0);
}

TEST_CASE("mode differences of the DtN decay like 1/k") {
  const oracles::DiskModel disk(1.0, 32);
  const CMat a = disk.dtn(-1.0), b = disk.dtn(cplx(2.0, 1.0));
  double c = 0.0;
  for (int k = 4; k <= 32; ++k) c = std::max(c, k * std::abs(a(k + 32, k + 32) - b(k + 32, k + 32)));
  // m_k(z) ~ -k + z/(2k): the fitted constant approaches |z1 - z2|/2
  CHECK(c <= 0.5 * std::abs(cplx(3.0, 1.0)) * 1.05);
  for (int k = 4; k <= 32; ++k) CHECK(std::abs(a(k + 32, k + 32) - b(k + 32, k + 32)) <= c / k);
}

TEST_CASE("resolved frame is orthonormal in the weighted inner product") {
  const auto g = make_grid(CurveSpec::kite(), 64);
  const CMat q = weyl::resolved_frame(g);
  CHECK(q.cols() == 33);
  const CMat gram = q.adjoint() * g.measure().asDiagonal() * q;
  CHECK((gram - CMat::Identity(33, 33)).norm() <= 1e-12);
}
