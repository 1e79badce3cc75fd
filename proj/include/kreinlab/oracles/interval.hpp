#pragma once

// Closed-form model on (0, 1). Fields are quasi-polynomials sum_t p_t(x) e^{s_t x},
// boundary data are pairs (value at 0, value at 1), and the outward normal is
// -1 at x = 0 and +1 at x = 1.

#include <cmath>
#include <string>
#include <vector>

#include "kreinlab/error.hpp"
#include "kreinlab/linalg.hpp"
#include "kreinlab/specfun.hpp"

namespace kreinlab::oracles {

struct QuasiTerm {
  cplx s = 0.0;
  std::vector<cplx> p;  // p[d] multiplies x^d
};

class IntervalField {
 public:
  IntervalField() = default;

  static IntervalField polynomial(std::vector<cplx> coeffs) {
    IntervalField f;
    f.add_term(0.0, std::move(coeffs));
    return f;
  }
  static IntervalField constant(cplx c) { return polynomial({c}); }
  static IntervalField exponential(cplx s, cplx amp = 1.0) {
    IntervalField f;
    f.add_term(s, {amp});
    return f;
  }
  static IntervalField cosine(double freq) {
    return exponential(I * freq, 0.5) + exponential(-I * freq, 0.5);
  }
  static IntervalField sine(double freq) {
    return exponential(I * freq, -0.5 * I) + exponential(-I * freq, 0.5 * I);
  }

  const std::vector<QuasiTerm>& terms() const { return terms_; }

  void add_term(cplx s, std::vector<cplx> p) {
    for (auto& t : terms_) {
      if (t.s == s) {
        if (t.p.size() < p.size()) t.p.resize(p.size(), 0.0);
        for (std::size_t d = 0; d < p.size(); ++d) t.p[d] += p[d];
        return;
      }
    }
    terms_.push_back({s, std::move(p)});
  }

  cplx value(double x) const {
    cplx v = 0.0;
    for (const auto& t : terms_) v += horner(t.p, x) * std::exp(t.s * x);
    return v;
  }
  cplx derivative(double x, int order = 1) const {
    IntervalField d = *this;
    for (int k = 0; k < order; ++k) d = d.derivative();
    return d.value(x);
  }

  // (p' + s p) e^{s x} termwise.
  IntervalField derivative() const {
    IntervalField out;
    for (const auto& t : terms_) {
      std::vector<cplx> q(t.p.size(), 0.0);
      for (std::size_t d = 0; d < t.p.size(); ++d) {
        q[d] += t.s * t.p[d];
        if (d > 0) q[d - 1] += double(d) * t.p[d];
      }
      out.terms_.push_back({t.s, std::move(q)});
    }
    return out;
  }

  IntervalField& operator+=(const IntervalField& o) {
    for (const auto& t : o.terms_) add_term(t.s, t.p);
    return *this;
  }
  IntervalField& operator*=(cplx a) {
    for (auto& t : terms_)
      for (auto& c : t.p) c *= a;
    return *this;
  }
  friend IntervalField operator+(IntervalField a, const IntervalField& b) { return a += b; }
  friend IntervalField operator-(IntervalField a, IntervalField b) { return a += (b *= -1.0); }
  friend IntervalField operator*(cplx a, IntervalField f) { return f *= a; }

 private:
  static cplx horner(const std::vector<cplx>& p, double x) {
    cplx v = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
    return v;
  }

  std::vector<QuasiTerm> terms_;
};

namespace detail {

// r with -r'' - 2 s r' - c r = p for polynomial p, c = s^2 + w.
inline std::vector<cplx> shifted_particular(cplx s, cplx w, const std::vector<cplx>& p) {
  const cplx c = s * s + w;
  const std::size_t deg = p.size();
  auto deriv = [](const std::vector<cplx>& q) {
    std::vector<cplx> d(q.size(), 0.0);
    for (std::size_t k = 1; k < q.size(); ++k) d[k - 1] = double(k) * q[k];
    return d;
  };
  auto integrate = [](const std::vector<cplx>& q) {
    std::vector<cplx> r(q.size() + 1, 0.0);
    for (std::size_t k = 0; k < q.size(); ++k) r[k + 1] = q[k] / double(k + 1);
    return r;
  };
  const double scale = std::max(1.0, std::norm(s));
  if (std::abs(c) > 1e-12 * scale) {
    // (c + 2 s D + D^2) r = -p  =>  r = -(1/c) sum_n (-(2 s D + D^2)/c)^n p
    std::vector<cplx> r(deg, 0.0), term = p;
    for (std::size_t n = 0; n <= 2 * deg + 1; ++n) {
      bool nonzero = false;
      for (std::size_t k = 0; k < deg; ++k) {
        r[k] -= term[k] / c;
        if (term[k] != 0.0) nonzero = true;
      }
      if (!nonzero) break;
      const auto d1 = deriv(term);
      const auto d2 = deriv(d1);
      for (std::size_t k = 0; k < deg; ++k) term[k] = -(2.0 * s * d1[k] + d2[k]) / c;
    }
    return r;
  }
  if (s != 0.0) {
    // v = r': -(D + 2 s) v = p  =>  v = -(1/(2s)) sum_n (-D/(2s))^n p
    std::vector<cplx> v(deg, 0.0), term = p;
    for (std::size_t n = 0; n <= deg; ++n) {
      for (std::size_t k = 0; k < deg; ++k) v[k] -= term[k] / (2.0 * s);
      const auto d1 = deriv(term);
      for (std::size_t k = 0; k < deg; ++k) term[k] = -d1[k] / (2.0 * s);
    }
    return integrate(v);
  }
  std::vector<cplx> mp(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) mp[k] = -p[k];
  return integrate(integrate(mp));
}

}  // namespace detail

class IntervalModel {
 public:
  using Field = IntervalField;

  explicit IntervalModel(int quad_nodes = 64) : quad_(la::gauss_legendre(quad_nodes, 0.0, 1.0)) {}

  static constexpr const char* name() { return "interval"; }
  int boundary_dim() const { return 2; }
  RVec metric() const { return RVec::Ones(2); }
  double default_z0() const { return 0.0; }

  CVec gamma_d(const Field& u) const { return CVec{{u.value(0.0), u.value(1.0)}}; }
  CVec gamma_n(const Field& u) const {
    const Field d = u.derivative();
    return CVec{{-d.value(0.0), d.value(1.0)}};
  }

  // (-Delta - w) u
  Field apply_op(const Field& u, cplx w) const {
    Field out = u.derivative().derivative();
    out *= -1.0;
    Field wu = u;
    wu *= -w;
    return out + wu;
  }

  // Some q with (-Delta - w) q = f.
  Field particular(cplx w, const Field& f) const {
    Field q;
    for (const auto& t : f.terms()) q.add_term(t.s, detail::shifted_particular(t.s, w, t.p));
    return q;
  }

  // Basis {cos(k x), sin(k x)/k}, k^2 = w, entire in w.
  std::vector<Field> harmonic_basis(cplx w) const {
    if (std::abs(w) < 1.0) {
      std::vector<cplx> c(62, 0.0), s(62, 0.0);
      cplx t = 1.0;
      for (int n = 0; n < 31; ++n) {
        c[2 * n] = t;
        s[2 * n + 1] = t / double(2 * n + 1);
        t *= -w / double((2 * n + 1) * (2 * n + 2));
      }
      return {Field::polynomial(c), Field::polynomial(s)};
    }
    const cplx k = specfun::sqrt_branch(w);
    return {Field::exponential(I * k, 0.5) + Field::exponential(-I * k, 0.5),
            Field::exponential(I * k, 0.5 / (I * k)) + Field::exponential(-I * k, -0.5 / (I * k))};
  }

  HarmonicTraces harmonic_traces(cplx w) const {
    const cplx c = cos_sqrt(w), sc = sinc_sqrt(w);
    HarmonicTraces h;
    h.dir = CMat{{1.0, 0.0}, {c, sc}};
    h.neu = CMat{{0.0, -1.0}, {-w * sc, c}};
    return h;
  }

  Field combine(cplx w, const CVec& a) const {
    auto b = harmonic_basis(w);
    return a[0] * b[0] + a[1] * b[1];
  }

  // (u, v) = int_0^1 u conj(v) dx
  cplx inner(const Field& u, const Field& v) const {
    cplx s = 0.0;
    for (std::size_t i = 0; i < quad_.x.size(); ++i) s += quad_.w[i] * u.value(quad_.x[i]) * std::conj(v.value(quad_.x[i]));
    return s;
  }

  CMat dtn(cplx z) const {
    const cplx c = cos_sqrt(z), sc = sinc_sqrt(z);
    if (std::abs(sc) < 1e-13 * std::max(1.0, std::abs(c)))
      throw Error(Errc::near_eigenvalue, "z is a Dirichlet eigenvalue of the interval");
    return CMat{{-c, 1.0}, {1.0, -c}} / sc;
  }
  CMat ntd(cplx z) const {
    return -la::inverse_checked(dtn(z), Errc::near_eigenvalue, "z is a Neumann eigenvalue of the interval");
  }

  static cplx cos_sqrt(cplx z) { return std::cos(specfun::sqrt_branch(z)); }
  static cplx sinc_sqrt(cplx z) {
    if (std::abs(z) < 1e-3) return 1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0;
    const cplx k = specfun::sqrt_branch(z);
    return std::sin(k) / k;
  }

  // cos(j pi x) and sin((j + 1/2) pi x), j = 0, 1, ..., interleaved.
  std::vector<Field> trial_family(int count) const {
    std::vector<Field> f;
    for (int j = 0; int(f.size()) < count; ++j) {
      f.push_back(Field::cosine(j * pi));
      if (int(f.size()) < count) f.push_back(Field::sine((j + 0.5) * pi));
    }
    return f;
  }

  const la::Quadrature& quadrature() const { return quad_; }

 private:
  la::Quadrature quad_;
};

// The closed-form interval Dirichlet-to-Neumann matrix.
inline CMat interval_dtn(cplx z) { return IntervalModel().dtn(z); }

}  // namespace kreinlab::oracles
