#pragma once

// Backend interfaces shared by the trace, extension and Krein-formula layers.
// A boundary backend provides the Dirichlet-to-Neumann map in a weighted
// boundary space; a field backend additionally represents interior fields with
// exact traces, the operator -Delta - w, particular solutions and w-harmonic bases.

#include <concepts>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "kreinlab/geometry.hpp"
#include "kreinlab/linalg.hpp"
#include "kreinlab/oracles/disk.hpp"
#include "kreinlab/oracles/interval.hpp"
#include "kreinlab/weyl.hpp"

namespace kreinlab {

template <class B>
concept BoundaryBackend = requires(const B& b, cplx z) {
  { b.boundary_dim() } -> std::convertible_to<int>;
  { b.metric() } -> std::convertible_to<RVec>;
  { b.dtn(z) } -> std::convertible_to<CMat>;
  { b.ntd(z) } -> std::convertible_to<CMat>;
  { b.default_z0() } -> std::convertible_to<double>;
};

template <class B>
concept FieldBackend = BoundaryBackend<B> &&
    requires(const B& b, const typename B::Field& u, cplx w, const CVec& a) {
      { b.gamma_d(u) } -> std::convertible_to<CVec>;
      { b.gamma_n(u) } -> std::convertible_to<CVec>;
      { b.apply_op(u, w) } -> std::convertible_to<typename B::Field>;
      { b.particular(w, u) } -> std::convertible_to<typename B::Field>;
      { b.harmonic_traces(w) } -> std::convertible_to<HarmonicTraces>;
      { b.combine(w, a) } -> std::convertible_to<typename B::Field>;
      { b.inner(u, u) } -> std::convertible_to<cplx>;
    };

// Nystrom discretization on a curve: boundary-level operators only.
class BemBackend {
 public:
  explicit BemBackend(geometry::BoundaryGrid grid)
      : grid_(std::move(grid)), cache_(std::make_shared<Cache>()) {}

  static constexpr const char* name() { return "bem"; }
  const geometry::BoundaryGrid& grid() const { return grid_; }
  int boundary_dim() const { return grid_.n; }
  RVec metric() const { return grid_.measure(); }
  double default_z0() const { return -1.0; }
  CMat dtn(cplx z) const { return cached(cache_->dtn, z, [&] { return weyl::dtn(grid_, z).matrix; }); }
  CMat ntd(cplx z) const { return cached(cache_->ntd, z, [&] { return weyl::ntd(grid_, z).matrix; }); }

 private:
  // Assembled maps keyed by z; copies of the backend share one cache.
  struct Cache {
    std::mutex lock;
    std::map<std::pair<double, double>, CMat> dtn, ntd;
  };
  static constexpr std::size_t cache_limit = 64;

  template <class F>
  CMat cached(std::map<std::pair<double, double>, CMat>& slot, cplx z, F make) const {
    const std::pair<double, double> key{z.real(), z.imag()};
    {
      std::lock_guard<std::mutex> g(cache_->lock);
      if (auto it = slot.find(key); it != slot.end()) return it->second;
    }
    CMat m = make();
    std::lock_guard<std::mutex> g(cache_->lock);
    if (slot.size() >= cache_limit) slot.clear();
    slot.emplace(key, m);
    return m;
  }

  geometry::BoundaryGrid grid_;
  std::shared_ptr<Cache> cache_;
};

static_assert(FieldBackend<oracles::IntervalModel>);
static_assert(FieldBackend<oracles::DiskModel>);
static_assert(BoundaryBackend<BemBackend>);

namespace model {

// w-harmonic field with Dirichlet trace g.
template <FieldBackend B>
typename B::Field poisson(const B& b, cplx w, const CVec& g) {
  const auto t = b.harmonic_traces(w);
  return b.combine(w, la::solve_checked(t.dir, g, Errc::near_eigenvalue, "w is a Dirichlet eigenvalue"));
}

// w-harmonic field with Neumann trace g.
template <FieldBackend B>
typename B::Field neumann_poisson(const B& b, cplx w, const CVec& g) {
  const auto t = b.harmonic_traces(w);
  return b.combine(w, la::solve_checked(t.neu, g, Errc::near_eigenvalue, "w is a Neumann eigenvalue"));
}

// (-Delta_D - w)^{-1} f
template <FieldBackend B>
typename B::Field dirichlet_resolvent(const B& b, cplx w, const typename B::Field& f) {
  const auto q = b.particular(w, f);
  return q - poisson(b, w, b.gamma_d(q));
}

// (-Delta_N - w)^{-1} f
template <FieldBackend B>
typename B::Field neumann_resolvent(const B& b, cplx w, const typename B::Field& f) {
  const auto q = b.particular(w, f);
  return q - neumann_poisson(b, w, b.gamma_n(q));
}

template <FieldBackend B>
double field_norm(const B& b, const typename B::Field& u) {
  return std::sqrt(std::abs(b.inner(u, u)));
}

}  // namespace model
}  // namespace kreinlab
