#pragma once

// Fourier-Bessel model of the disk of radius R, truncated to modes |k| <= K.
// A field is sum_k u_k(r) e^{ik theta} with each profile stored as a power
// series u_k(r) = sum_j c_j r^{2j+|k|}. Boundary vectors hold coefficients in
// the orthonormal basis e^{ik theta}/sqrt(2 pi R), index k + K.

#include <algorithm>
#include <cmath>
#include <vector>

#include "kreinlab/error.hpp"
#include "kreinlab/linalg.hpp"
#include "kreinlab/specfun.hpp"

namespace kreinlab::oracles {

class DiskField {
 public:
  DiskField() = default;
  explicit DiskField(int cutoff) : cutoff_(cutoff), modes_(2 * cutoff + 1) {}

  // c_0 r^{|k|} + c_1 r^{|k|+2} + ... times e^{ik theta}.
  static DiskField mode(int cutoff, int k, std::vector<cplx> coeffs) {
    DiskField f(cutoff);
    f.profile(k) = std::move(coeffs);
    return f;
  }

  int cutoff() const { return cutoff_; }
  std::vector<cplx>& profile(int k) { return modes_.at(k + cutoff_); }
  const std::vector<cplx>& profile(int k) const { return modes_.at(k + cutoff_); }

  cplx profile_value(int k, double r) const { return eval(profile(k), std::abs(k), r, 0); }
  cplx profile_derivative(int k, double r) const { return eval(profile(k), std::abs(k), r, 1); }

  cplx value(double r, double theta) const {
    cplx s = 0.0;
    for (int k = -cutoff_; k <= cutoff_; ++k)
      if (!profile(k).empty()) s += profile_value(k, r) * std::polar(1.0, k * theta);
    return s;
  }

  // Cartesian gradient (d/dx, d/dy) at polar point (r, theta), r > 0.
  std::pair<cplx, cplx> gradient(double r, double theta) const {
    cplx ur = 0.0, ut_over_r = 0.0;
    for (int k = -cutoff_; k <= cutoff_; ++k) {
      if (profile(k).empty()) continue;
      const cplx e = std::polar(1.0, k * theta);
      ur += profile_derivative(k, r) * e;
      ut_over_r += I * double(k) * eval(profile(k), std::abs(k), r, -1) * e;
    }
    const double c = std::cos(theta), s = std::sin(theta);
    return {ur * c - ut_over_r * s, ur * s + ut_over_r * c};
  }

  DiskField& operator+=(const DiskField& o) {
    if (cutoff_ < o.cutoff_) {
      DiskField grown(o.cutoff_);
      for (int k = -cutoff_; k <= cutoff_; ++k) grown.profile(k) = profile(k);
      *this = std::move(grown);
    }
    for (int k = -o.cutoff_; k <= o.cutoff_; ++k) {
      auto& a = profile(k);
      const auto& b = o.profile(k);
      if (a.size() < b.size()) a.resize(b.size(), 0.0);
      for (std::size_t j = 0; j < b.size(); ++j) a[j] += b[j];
    }
    return *this;
  }
  DiskField& operator*=(cplx a) {
    for (auto& m : modes_)
      for (auto& c : m) c *= a;
    return *this;
  }
  friend DiskField operator+(DiskField a, const DiskField& b) { return a += b; }
  friend DiskField operator-(DiskField a, DiskField b) { return a += (b *= -1.0); }
  friend DiskField operator*(cplx a, DiskField f) { return f *= a; }

 private:
  // deriv = 0: profile, 1: d/dr, -1: profile / r.
  static cplx eval(const std::vector<cplx>& c, int k, double r, int deriv) {
    if (c.empty()) return 0.0;
    const double r2 = r * r;
    cplx s = 0.0;
    for (std::size_t j = c.size(); j-- > 0;) {
      const double factor = deriv == 1 ? double(2 * j + k) : 1.0;
      s = s * r2 + factor * c[j];
    }
    const int power = deriv == 0 ? k : k - 1;
    if (power >= 0) return s * std::pow(r, power);
    return r == 0.0 ? cplx(0.0) : s / r;
  }

  int cutoff_ = 0;
  std::vector<std::vector<cplx>> modes_;
};

namespace detail {

inline constexpr int disk_series_cap = 600;

// Coefficients of r^{-|k|} phi(r), phi regular with (-Delta - mu) phi e^{ik theta} = 0, leading coefficient 1.
inline std::vector<cplx> regular_atom(int k, cplx mu, double radius) {
  std::vector<cplx> c{1.0};
  const double r2 = radius * radius;
  double peak = 1.0, scale = 1.0;
  for (int m = 1; m < disk_series_cap; ++m) {
    c.push_back(c.back() * (-mu / 4.0) / (double(m) * double(m + k)));
    scale *= r2;
    const double mag = std::abs(c.back()) * scale;
    peak = std::max(peak, mag);
    if (mag < 1e-18 * peak && m > std::abs(mu) * r2) break;
  }
  return c;
}

}  // namespace detail

class DiskModel {
 public:
  using Field = DiskField;

  explicit DiskModel(double radius = 1.0, int cutoff = 32, int quad_nodes = 64)
      : radius_(radius), cutoff_(cutoff), quad_(la::gauss_legendre(quad_nodes, 0.0, radius)) {
    if (!(radius > 0.0)) throw Error(Errc::spec_invalid, "disk radius must be positive");
    if (cutoff < 0) throw Error(Errc::spec_invalid, "mode cutoff must be nonnegative");
  }

  static constexpr const char* name() { return "disk"; }
  double radius() const { return radius_; }
  int cutoff() const { return cutoff_; }
  int boundary_dim() const { return 2 * cutoff_ + 1; }
  RVec metric() const { return RVec::Ones(boundary_dim()); }
  double default_z0() const { return -1.0; }

  double basis_scale() const { return std::sqrt(2.0 * pi * radius_); }

  CVec gamma_d(const Field& u) const {
    CVec g = CVec::Zero(boundary_dim());
    for (int k = -std::min(cutoff_, u.cutoff()); k <= std::min(cutoff_, u.cutoff()); ++k)
      g[k + cutoff_] = basis_scale() * u.profile_value(k, radius_);
    return g;
  }
  CVec gamma_n(const Field& u) const {
    CVec g = CVec::Zero(boundary_dim());
    for (int k = -std::min(cutoff_, u.cutoff()); k <= std::min(cutoff_, u.cutoff()); ++k)
      g[k + cutoff_] = basis_scale() * u.profile_derivative(k, radius_);
    return g;
  }

  // -Delta (r^{2j+k} e^{ik theta}) = -4 j (j + k) r^{2j+k-2} e^{ik theta}
  Field apply_op(const Field& u, cplx w) const {
    Field out(u.cutoff());
    for (int k = -u.cutoff(); k <= u.cutoff(); ++k) {
      const auto& c = u.profile(k);
      const int ak = std::abs(k);
      std::vector<cplx> d(c.size(), 0.0);
      for (std::size_t j = 0; j < c.size(); ++j) {
        d[j] = -w * c[j];
        if (j + 1 < c.size()) d[j] -= 4.0 * double(j + 1) * double(j + 1 + ak) * c[j + 1];
      }
      out.profile(k) = std::move(d);
    }
    return out;
  }

  // Regular particular solution of (-Delta - w) q = f by upward series recursion.
  Field particular(cplx w, const Field& f) const {
    Field q(f.cutoff());
    const double r2 = radius_ * radius_;
    for (int k = -f.cutoff(); k <= f.cutoff(); ++k) {
      const auto& a = f.profile(k);
      if (a.empty()) continue;
      const int ak = std::abs(k);
      std::vector<cplx> b{0.0};
      double peak = 0.0, scale = 1.0;
      for (int j = 0; j < detail::disk_series_cap; ++j) {
        const cplx aj = j < int(a.size()) ? a[j] : 0.0;
        b.push_back(-(aj + w * b[j]) / (4.0 * double(j + 1) * double(j + 1 + ak)));
        scale *= r2;
        const double mag = std::abs(b.back()) * scale;
        peak = std::max(peak, mag);
        if (j + 1 >= int(a.size()) && mag <= 1e-18 * peak && j > std::abs(w) * r2) break;
      }
      q.profile(k) = std::move(b);
    }
    return q;
  }

  std::vector<Field> harmonic_basis(cplx w) const {
    std::vector<Field> basis;
    for (int k = -cutoff_; k <= cutoff_; ++k) {
      auto c = detail::regular_atom(std::abs(k), w, radius_);
      for (auto& x : c) x /= basis_scale();
      basis.push_back(Field::mode(cutoff_, k, std::move(c)));
    }
    return basis;
  }

  HarmonicTraces harmonic_traces(cplx w) const {
    const int n = boundary_dim();
    HarmonicTraces t{CMat::Zero(n, n), CMat::Zero(n, n)};
    for (int k = -cutoff_; k <= cutoff_; ++k) {
      const Field a = Field::mode(cutoff_, k, detail::regular_atom(std::abs(k), w, radius_));
      t.dir(k + cutoff_, k + cutoff_) = a.profile_value(k, radius_);
      t.neu(k + cutoff_, k + cutoff_) = a.profile_derivative(k, radius_);
    }
    return t;
  }

  Field combine(cplx w, const CVec& a) const {
    Field u(cutoff_);
    for (int k = -cutoff_; k <= cutoff_; ++k) {
      if (a[k + cutoff_] == 0.0) continue;
      auto c = detail::regular_atom(std::abs(k), w, radius_);
      for (auto& x : c) x *= a[k + cutoff_] / basis_scale();
      u.profile(k) = std::move(c);
    }
    return u;
  }

  // (u, v) = 2 pi sum_k int_0^R u_k conj(v_k) r dr
  cplx inner(const Field& u, const Field& v) const {
    cplx s = 0.0;
    const int kk = std::min(u.cutoff(), v.cutoff());
    for (int k = -kk; k <= kk; ++k) {
      if (u.profile(k).empty() || v.profile(k).empty()) continue;
      for (std::size_t i = 0; i < quad_.x.size(); ++i) {
        const double r = quad_.x[i];
        s += quad_.w[i] * r * u.profile_value(k, r) * std::conj(v.profile_value(k, r));
      }
    }
    return 2.0 * pi * s;
  }

  // Mode-wise Dirichlet-to-Neumann values from the series profiles.
  CMat dtn(cplx z) const {
    const HarmonicTraces t = harmonic_traces(z);
    CMat m = CMat::Zero(boundary_dim(), boundary_dim());
    for (int i = 0; i < boundary_dim(); ++i) {
      if (z == 0.0) {
        m(i, i) = -double(std::abs(i - cutoff_)) / radius_;
        continue;
      }
      if (std::abs(t.dir(i, i)) < 1e-12 * series_magnitude(std::abs(i - cutoff_), z))
        throw Error(Errc::near_eigenvalue, "z is a Dirichlet eigenvalue of the disk");
      m(i, i) = -t.neu(i, i) / t.dir(i, i);
    }
    return m;
  }
  CMat ntd(cplx z) const {
    return -la::inverse_checked(dtn(z), Errc::near_eigenvalue, "z is a Neumann eigenvalue of the disk");
  }

  // Monomials r^d e^{ik theta} with d - |k| even, by increasing degree d.
  std::vector<Field> trial_family(int count) const {
    std::vector<Field> f;
    for (int d = 0; int(f.size()) < count; ++d)
      for (int k = -std::min(d, cutoff_); k <= std::min(d, cutoff_) && int(f.size()) < count; ++k) {
        if ((d - std::abs(k)) % 2 != 0) continue;
        std::vector<cplx> c((d - std::abs(k)) / 2 + 1, 0.0);
        c.back() = 1.0;
        f.push_back(Field::mode(cutoff_, k, std::move(c)));
      }
    return f;
  }

  // Tail bound for the truncated Dirichlet-to-Neumann map: |m_k| grows like |k|/R.
  double truncation_tail() const { return (cutoff_ + 1) / radius_; }

 private:
  double series_magnitude(int k, cplx z) const {
    const auto c = detail::regular_atom(k, z, radius_);
    double s = 0.0, p = std::pow(radius_, k);
    for (const auto& x : c) {
      s += std::abs(x) * p;
      p *= radius_ * radius_;
    }
    return s;
  }

  double radius_;
  int cutoff_;
  la::Quadrature quad_;
};

// -sqrt(z) J_k'(sqrt(z) R) / J_k(sqrt(z) R), and -|k|/R at z = 0.
inline cplx disk_mode_dtn(int k, cplx z, double radius) {
  const int ak = std::abs(k);
  if (z == 0.0) return -double(ak) / radius;
  const cplx s = specfun::sqrt_branch(z);
  const cplx j = specfun::bessel_j(ak, s * radius);
  const cplx jp = specfun::bessel_j_prime(ak, s * radius);
  if (std::abs(j) < 1e-13 * std::max(1.0, std::abs(jp)))
    throw Error(Errc::near_eigenvalue, "J_k vanishes at sqrt(z) R");
  return -s * jp / j;
}

}  // namespace kreinlab::oracles
