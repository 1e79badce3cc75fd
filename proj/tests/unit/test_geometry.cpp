#include <catch_amalgamated.hpp>

#include "kreinlab/geometry.hpp"

using namespace kreinlab;
using geometry::CurveSpec;
using geometry::make_grid;
using Catch::Matchers::WithinAbs;

namespace {

const CurveSpec catalog[] = {CurveSpec::circle(1.0), CurveSpec::circle(2.0), CurveSpec::ellipse(2.0, 1.0),
                             CurveSpec::kite(), CurveSpec::star(0.2, 5)};

Errc code_of(auto f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::bracket_singular;
}

}  // namespace

TEST_CASE("node counts below 16 or odd are rejected") {
  CHECK(code_of([] { make_grid(CurveSpec::circle(1.0), 8); }) == Errc::bad_node_count);
  CHECK(code_of([] { make_grid(CurveSpec::circle(1.0), 17); }) == Errc::bad_node_count);
  CHECK_NOTHROW(make_grid(CurveSpec::circle(1.0), 16));
}

TEST_CASE("circle node 0 and its normal") {
  const auto g = make_grid(CurveSpec::circle(1.0), 16);
  CHECK_THAT(g.x(0, 0), WithinAbs(1.0, 1e-15));
  CHECK_THAT(g.x(0, 1), WithinAbs(0.0, 1e-15));
  CHECK_THAT(g.normal(0, 0), WithinAbs(1.0, 1e-15));
  CHECK_THAT(g.normal(0, 1), WithinAbs(0.0, 1e-15));
}

TEST_CASE("perimeters") {
  CHECK_THAT(make_grid(CurveSpec::circle(2.0), 64).length(), WithinAbs(4.0 * pi, 1e-12));
  // adaptive-quadrature perimeter from tests/oracles/special_values.py
  CHECK_THAT(make_grid(CurveSpec::ellipse(2.0, 1.0), 256).length(), WithinAbs(9.6884482205476761984, 1e-10));
}

TEST_CASE("grid invariants on the catalog") {
  for (const auto& c : catalog) {
    INFO(c.name());
    // the kite's speed has complex singularities close to the real axis: N = 64 gives 3e-7
    const auto g = make_grid(c, c.kind == geometry::CurveKind::kite ? 128 : 64);
    for (int j = 0; j < g.n; ++j) {
      CHECK_THAT(std::hypot(g.normal(j, 0), g.normal(j, 1)), WithinAbs(1.0, 1e-14));
      CHECK(g.weight[j] > 0.0);
    }
    CHECK_THAT(g.length(), WithinAbs(make_grid(c, 1024).length(), 1e-10));
  }
}

TEST_CASE("divergence theorem for F(x) = x gives twice the area") {
  auto flux = [](const geometry::BoundaryGrid& g) {
    const RVec m = g.measure();
    double s = 0.0;
    for (int j = 0; j < g.n; ++j) s += m[j] * (g.normal(j, 0) * g.x(j, 0) + g.normal(j, 1) * g.x(j, 1));
    return s;
  };
  CHECK_THAT(flux(make_grid(CurveSpec::circle(1.5), 64)), WithinAbs(2.0 * pi * 2.25, 1e-10));
  CHECK_THAT(flux(make_grid(CurveSpec::ellipse(2.0, 1.0), 128)), WithinAbs(2.0 * pi * 2.0, 1e-10));
  for (const auto& c : catalog) CHECK_THAT(flux(make_grid(c, 128)), WithinAbs(flux(make_grid(c, 1024)), 1e-10));
}

TEST_CASE("doubling N refines without moving shared nodes") {
  for (const auto& c : catalog) {
    const auto a = make_grid(c, 64), b = make_grid(c, 128);
    for (int j = 0; j < a.n; ++j) {
      CHECK(a.x(j, 0) == b.x(2 * j, 0));
      CHECK(a.x(j, 1) == b.x(2 * j, 1));
    }
  }
}

TEST_CASE("curve validation") {
  CHECK(code_of([] { CurveSpec::star(1.0, 5).validate(); }) == Errc::spec_invalid);
  CHECK(code_of([] { CurveSpec::circle(0.0).validate(); }) == Errc::spec_invalid);
  CHECK(code_of([] { CurveSpec::ellipse(1.0, -1.0).validate(); }) == Errc::spec_invalid);
  CHECK_NOTHROW(CurveSpec::kite().validate());
  CHECK(make_grid(CurveSpec::kite(), 32).quasi_convex);
}

TEST_CASE("grids carry distinct identity tokens") {
  const auto a = make_grid(CurveSpec::kite(), 32), b = make_grid(CurveSpec::kite(), 32);
  CHECK(a.token != b.token);
}
