#pragma once

// Dirichlet and Neumann traces, the regularized traces
//   tau_N(z0) u = gamma_N u + dtn(z0) gamma_D u,
//   tau_D(z0) u = gamma_D u - ntd(z0) gamma_N u,
// and the Green formula defect meter.

#include "kreinlab/backend.hpp"
#include "kreinlab/weyl.hpp"

namespace kreinlab::traces {

template <FieldBackend B>
CVec gamma_D(const B& b, const typename B::Field& u) {
  return b.gamma_d(u);
}

template <FieldBackend B>
CVec gamma_N(const B& b, const typename B::Field& u) {
  return b.gamma_n(u);
}

inline CVec gamma_D(const weyl::LayerField& u) { return u.trace_d; }
inline CVec gamma_N(const weyl::LayerField& u) { return u.trace_n; }

template <FieldBackend B>
CVec tau_N(const B& b, cplx z0, const typename B::Field& u) {
  return b.gamma_n(u) + b.dtn(z0) * b.gamma_d(u);
}

template <FieldBackend B>
CVec tau_D(const B& b, cplx z0, const typename B::Field& u) {
  return b.gamma_d(u) - b.ntd(z0) * b.gamma_n(u);
}

inline CVec tau_N(cplx z0, const weyl::LayerField& u) {
  return u.trace_n + weyl::dtn(u.grid, z0).matrix * u.trace_d;
}

inline CVec tau_D(cplx z0, const weyl::LayerField& u) {
  return u.trace_d - weyl::ntd(u.grid, z0).matrix * u.trace_n;
}

// |((-Delta - z)u, v) - (u, (-Delta - conj z)v) + <tau_N(z) u, gamma_D v> - conj<tau_N(conj z) v, gamma_D u>|
template <FieldBackend B>
double green_defect(const B& b, cplx z, const typename B::Field& u, const typename B::Field& v) {
  const RVec w = b.metric();
  const cplx interior = b.inner(b.apply_op(u, z), v) - b.inner(u, b.apply_op(v, std::conj(z)));
  const cplx boundary = la::pairing(tau_N(b, z, u), b.gamma_d(v), w) -
                        std::conj(la::pairing(tau_N(b, std::conj(z), v), b.gamma_d(u), w));
  return std::abs(interior + boundary);
}

// Layer-potential fields carry no interior quadrature.
inline double green_defect(cplx, const weyl::LayerField&, const weyl::LayerField&) {
  throw Error(Errc::quadrature_unavailable, "layer-density fields have no interior quadrature grid");
}

}  // namespace kreinlab::traces
