#pragma once

// Eigenvalues of -Delta under an extension's boundary condition, located as the
// real points where the boundary system of the extension loses rank, and the
// resolvent ordering of extensions on a trial family.

#include <algorithm>
#include <cmath>
#include <vector>

#include "kreinlab/extensions.hpp"
#include "kreinlab/layerpot.hpp"
#include "kreinlab/parallel.hpp"

namespace kreinlab::spectral {

struct ScanOptions {
  double points_per_unit = 400.0;
  double tolerance = 1e-12;     // absolute, on the eigenvalue
  double accept_ratio = 1e-7;   // sigma_min / sigma_max at a refined root
  double multiplicity_ratio = 1e-6;
  long max_points = 4'000'000;
};

struct Eigenvalue {
  double value = 0.0;
  int multiplicity = 1;
  double ratio = 0.0;  // sigma_min / sigma_max at the root
};

namespace detail {

inline RVec singular_values(const CMat& a) {
  Eigen::JacobiSVD<CMat> svd(a);
  return svd.singularValues();
}

inline double rank_ratio(const CMat& a) {
  const RVec s = singular_values(a);
  return s.maxCoeff() > 0.0 ? s.minCoeff() / s.maxCoeff() : 0.0;
}

// Scans ratio(lambda) on [a, b], refines each sampled local minimum by golden
// section, and keeps minima where the ratio drops below the acceptance level.
template <class System>
std::vector<Eigenvalue> scan(const System& system, double a, double b, const ScanOptions& opt) {
  if (!(b > a)) return {};
  const long n = std::max<long>(8, long(std::ceil((b - a) * opt.points_per_unit)) + 1);
  if (n > opt.max_points)
    throw Error(Errc::window_too_wide, "scan of [" + std::to_string(a) + ", " + std::to_string(b) + "] needs " +
                                           std::to_string(n) + " points");
  const double h = (b - a) / double(n - 1);
  std::vector<double> r(n);
  parallel_for(int(n), [&](int i) {
    try {
      r[i] = rank_ratio(system(a + i * h));
    } catch (const Error&) {
      r[i] = INFINITY;
    }
  });
  auto ratio = [&](double x) {
    try {
      return rank_ratio(system(x));
    } catch (const Error&) {
      return double(INFINITY);
    }
  };
  std::vector<Eigenvalue> out;
  for (long i = 0; i < n; ++i) {
    const double left = i > 0 ? r[i - 1] : INFINITY, right = i + 1 < n ? r[i + 1] : INFINITY;
    if (!(r[i] <= left && r[i] < right)) continue;
    double lo = a + std::max<long>(i - 1, 0) * h, hi = a + std::min<long>(i + 1, n - 1) * h;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = ratio(x1), f2 = ratio(x2);
    while (hi - lo > opt.tolerance) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - g * (hi - lo);
        f1 = ratio(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + g * (hi - lo);
        f2 = ratio(x2);
      }
    }
    const double x = 0.5 * (lo + hi);
    if (x <= a || x >= b) continue;
    const RVec s = singular_values(system(x));
    const double ratio_at = s.minCoeff() / s.maxCoeff();
    if (!(ratio_at <= opt.accept_ratio)) continue;
    Eigenvalue ev{x, 0, ratio_at};
    for (Eigen::Index k = 0; k < s.size(); ++k) ev.multiplicity += s[k] <= opt.multiplicity_ratio * s.maxCoeff();
    if (!out.empty() && std::abs(out.back().value - x) < 10.0 * opt.tolerance) continue;
    out.push_back(ev);
  }
  return out;
}

}  // namespace detail

// Eigenvalues lambda of -Delta in (a, b) for the extension, i.e. of the shifted
// operator at lambda - z0, on a model backend.
template <FieldBackend B>
std::vector<Eigenvalue> eigenvalues(const ext::Extension<B>& e, double a, double b, const ScanOptions& opt = {}) {
  const int n = e.boundary_dim();
  auto system = [&](double lambda) {
    return ext::boundary_system(e, lambda, CVec::Zero(n), CVec::Zero(n)).first;
  };
  return detail::scan(system, a, b, opt);
}

// Nystrom version: with u = S_lambda phi the boundary system becomes
// P((1/2 + K#) + (M(z0) + L) V) + (I - P) V acting on densities.
inline std::vector<Eigenvalue> eigenvalues(const ext::Extension<BemBackend>& e, double a, double b,
                                           const ScanOptions& opt = {}) {
  if (e.reference() != ext::Reference::dirichlet)
    throw Error(Errc::backend_unsupported, "Nystrom spectra use the Dirichlet reference");
  const auto& g = e.backend().grid();
  const int n = g.n;
  const CMat q = CMat::Identity(n, n) - e.projector();
  auto system = [&](double lambda) {
    const CMat v = layerpot::assemble_single_layer_trace(g, lambda).matrix;
    const CMat k = layerpot::neumann_trace_of_single_layer(g, lambda).matrix;
    return CMat(e.projector() * (k + (e.reference_map() + e.boundary_operator()) * v) + q * v);
  };
  return detail::scan(system, a, b, opt);
}

inline std::vector<double> values(const std::vector<Eigenvalue>& evs) {
  std::vector<double> out;
  for (const auto& e : evs)
    for (int m = 0; m < std::max(1, e.multiplicity); ++m) out.push_back(e.value);
  return out;
}

// Krein eigenvalues on (0, 1) from dom(S_K) = dom(S) + ker(S*): u = A cos(s x) + B sin(s x)
// with u'(0) = u'(1) = u(1) - u(0); the determinant of that 2x2 system in s, bisected.
inline std::vector<double> interval_krein_shooting(double a, double b, double tol = 1e-13) {
  auto det = [](double s) {
    const double c = std::cos(s), sn = std::sin(s);
    // rows: u'(0) - (u(1) - u(0)), u'(1) - (u(1) - u(0)) in the unknowns (A, B)
    const double a11 = -(c - 1.0), a12 = s - sn;
    const double a21 = -s * sn - (c - 1.0), a22 = s * c - sn;
    return (a11 * a22 - a12 * a21) / (s * s);
  };
  std::vector<double> roots;
  const double sa = std::sqrt(std::max(a, 0.0)), sb = std::sqrt(b);
  const int n = int(std::ceil((sb - sa) * 2000.0)) + 1;
  const double h = (sb - sa) / n;
  std::vector<double> f(n + 1);
  for (int i = 0; i <= n; ++i) f[i] = det(sa + i * h);
  for (int i = 0; i < n; ++i) {
    double lo = sa + i * h, hi = lo + h;
    if (f[i] * f[i + 1] < 0.0) {
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (det(lo) * det(mid) <= 0.0 ? hi : lo) = mid;
      }
      roots.push_back(0.25 * (lo + hi) * (lo + hi));
    }
  }
  // Touching roots (no sign change) show up as local minima of |det| that reach zero.
  for (int i = 1; i < n; ++i) {
    if (!(std::abs(f[i]) <= std::abs(f[i - 1]) && std::abs(f[i]) < std::abs(f[i + 1]))) continue;
    if (f[i - 1] * f[i + 1] < 0.0) continue;
    double lo = sa + (i - 1) * h, hi = sa + (i + 1) * h;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    while (hi - lo > tol) {
      const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
      (std::abs(det(x1)) < std::abs(det(x2)) ? hi : lo) = (std::abs(det(x1)) < std::abs(det(x2)) ? x2 : x1);
    }
    const double x = 0.5 * (lo + hi);
    if (std::abs(det(x)) < 1e-12) roots.push_back(x * x);
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots)
    if (r > a && r < b && (out.empty() || std::abs(out.back() - r) > 1e-9 * r)) out.push_back(r);
  return out;
}

struct OrderingReport {
  double min_lower_gap = 0.0;  // min eig(G_ext - G_D)
  double min_upper_gap = 0.0;  // min eig(G_K - G_ext)
  bool ordered = false;
};

inline constexpr double ordering_floor = -1e-9;

// G[i, j] = (R(-a) phi_j, phi_i)
template <FieldBackend B>
CMat galerkin_resolvent(const ext::Extension<B>& e, double a, const std::vector<typename B::Field>& trial) {
  const int m = int(trial.size());
  CMat g(m, m);
  for (int j = 0; j < m; ++j) {
    const auto u = ext::apply_resolvent(e, -a, trial[j]);
    for (int i = 0; i < m; ++i) g(i, j) = e.backend().inner(u, trial[i]);
  }
  return g;
}

inline double min_hermitian_eig(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Checks G_D <= G_ext <= G_K for the Dirichlet and Krein extensions at the same shift.
template <FieldBackend B>
OrderingReport ordering_check(const ext::Extension<B>& e, double a, int members = 40) {
  const auto& b = e.backend();
  const auto trial = b.trial_family(members);
  const ext::Extension<B> d(ext::ExtensionSpec::dirichlet().at(e.z0()), b);
  const ext::Extension<B> k(ext::ExtensionSpec::krein().at(e.z0()), b);
  const CMat gd = galerkin_resolvent(d, a, trial), gk = galerkin_resolvent(k, a, trial),
             ge = galerkin_resolvent(e, a, trial);
  OrderingReport r;
  r.min_lower_gap = min_hermitian_eig(ge - gd);
  r.min_upper_gap = min_hermitian_eig(gk - ge);
  r.ordered = r.min_lower_gap >= ordering_floor && r.min_upper_gap >= ordering_floor;
  return r;
}

}  // namespace kreinlab::spectral
