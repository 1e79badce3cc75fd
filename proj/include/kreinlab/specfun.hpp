#pragma once

// Integer-order Bessel and Hankel functions of complex argument, and the
// Helmholtz fundamental solution in two and three dimensions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "kreinlab/error.hpp"
#include "kreinlab/linalg.hpp"

namespace kreinlab::specfun {

inline constexpr int max_order = 60;
inline constexpr double max_argument = 60.0;
inline constexpr double series_radius = 12.0;
inline constexpr double euler_gamma = 0.57721566490153286060651209;

namespace detail {

inline void check_range(int n, cplx x) {
  if (n < 0 || n > max_order)
    throw Error(Errc::range_exceeded, "order " + std::to_string(n) + " outside [0, 60]");
  if (!(std::abs(x) <= max_argument))
    throw Error(Errc::range_exceeded, "argument modulus " + std::to_string(std::abs(x)) + " > 60");
}

// Ascending series (x/2)^n sum_m (-x^2/4)^m / (m! (m+n)!).
inline cplx j_series(int n, cplx x) {
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  cplx t = 1.0;
  for (int k = 1; k <= n; ++k) t *= x / (2.0 * k);
  const cplx q = -x * x / 4.0;
  cplx s = t;
  for (int m = 1; m < 500; ++m) {
    t *= q / (double(m) * double(m + n));
    s += t;
    if (std::abs(t) <= 1e-17 * std::abs(s) && m > std::abs(q)) break;
  }
  return s;
}

// J_0..J_nmax by normalized backward recurrence (1 = J_0 + 2 sum J_2k).
inline std::vector<cplx> j_miller(int nmax, cplx x) {
  const double ax = std::abs(x);
  const double top = std::max<double>(nmax, std::ceil(ax));
  int m = int(top + std::ceil(std::sqrt(60.0 * top)) + 20);
  m += m % 2;
  std::vector<cplx> f(m + 2, 0.0);
  f[m] = 1e-30;
  cplx sum = 0.0;
  for (int k = m; k >= 1; --k) {
    f[k - 1] = (2.0 * k / x) * f[k] - f[k + 1];
    if (std::abs(f[k - 1]) > 1e200) {
      for (int j = k - 1; j <= m; ++j) f[j] *= 1e-200;
      sum *= 1e-200;
    }
    if ((k - 1) % 2 == 0 && k - 1 > 0) sum += 2.0 * f[k - 1];
  }
  sum += f[0];
  std::vector<cplx> out(nmax + 1);
  for (int k = 0; k <= nmax; ++k) out[k] = f[k] / sum;
  return out;
}

// Limit formula with digamma terms, orders 0 and 1, small |x|.
inline cplx y_series(int n, cplx x) {
  const cplx half = x / 2.0;
  const cplx lg = std::log(half);
  cplx finite = 0.0;
  if (n == 1) finite = 1.0 / half;
  cplx t = 1.0;
  for (int k = 1; k <= n; ++k) t *= half / double(k);
  const cplx q = -x * x / 4.0;
  double psi1 = -euler_gamma;
  double psi2 = -euler_gamma;
  for (int k = 1; k <= n; ++k) psi2 += 1.0 / k;
  cplx s = t * (psi1 + psi2);
  for (int k = 1; k < 500; ++k) {
    t *= q / (double(k) * double(k + n));
    psi1 += 1.0 / k;
    psi2 += 1.0 / (k + n);
    const cplx term = t * (psi1 + psi2);
    s += term;
    if (std::abs(term) <= 1e-17 * std::abs(s) && k > std::abs(q)) break;
  }
  return -finite / pi + 2.0 / pi * lg * j_series(n, x) - s / pi;
}

// Hankel large-argument expansion; kind = +1 for H^(1), -1 for H^(2).
inline cplx hankel_asymptotic(int n, cplx x, int kind) {
  const double mu = 4.0 * n * n;
  const cplx omega = x - (0.5 * n + 0.25) * pi;
  const cplx unit = kind > 0 ? I : -I;
  cplx term = 1.0, s = 1.0;
  double prev = INFINITY;
  for (int k = 1; k < 80; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= unit * (mu - odd * odd) / (8.0 * k * x);
    const double mag = std::abs(term);
    if (mag > prev) break;
    s += term;
    prev = mag;
    if (mag < 1e-17 * std::abs(s)) break;
  }
  return std::sqrt(2.0 / (pi * x)) * std::exp(unit * omega) * s;
}

// H^(1)_n for Im x > 0 from K_n(w) = int_0^inf exp(-w cosh s) cosh(n s) ds, w = -i x.
inline cplx hankel1_integral(int n, cplx x) {
  const cplx w = -I * x;
  const double rw = w.real();
  const double h = 0.04;
  cplx s = 0.5 * std::exp(-w);
  for (int j = 1; j < 100000; ++j) {
    const double t = j * h;
    const double expo = -rw * std::cosh(t) + n * t;
    if (expo < -745.0 && t > 1.0) break;
    s += std::exp(-w * std::cosh(t)) * std::cosh(n * t);
  }
  const cplx kn = h * s;
  return 2.0 / (pi * std::pow(I, n + 1)) * kn;
}

// H^(1)_0 and H^(1)_1.
inline void hankel1_01(cplx x, cplx& h0, cplx& h1) {
  const double ax = std::abs(x);
  if (ax > series_radius) {
    h0 = hankel_asymptotic(0, x, 1);
    h1 = hankel_asymptotic(1, x, 1);
  } else if (x.imag() >= std::max(2.0, std::abs(x.real()))) {
    h0 = hankel1_integral(0, x);
    h1 = hankel1_integral(1, x);
  } else {
    h0 = j_series(0, x) + I * y_series(0, x);
    h1 = j_series(1, x) + I * y_series(1, x);
  }
}

}  // namespace detail

// Branch of z^{1/2} with nonnegative imaginary part (nonnegative real root for z >= 0).
inline cplx sqrt_branch(cplx z) {
  cplx s = std::sqrt(z);
  if (s.imag() < 0.0 || (s.imag() == 0.0 && s.real() < 0.0)) s = -s;
  return s;
}

inline cplx bessel_j(int n, cplx x) {
  detail::check_range(n, x);
  if (std::abs(x) <= series_radius) return detail::j_series(n, x);
  return detail::j_miller(n, x)[n];
}

inline cplx hankel1(int n, cplx x) {
  detail::check_range(n, x);
  if (x == 0.0) throw Error(Errc::domain_error, "Hankel function is singular at 0");
  cplx h0, h1;
  detail::hankel1_01(x, h0, h1);
  if (n == 0) return h0;
  for (int k = 1; k < n; ++k) {
    const cplx h2 = (2.0 * k / x) * h1 - h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

inline cplx bessel_y(int n, cplx x) {
  detail::check_range(n, x);
  if (x == 0.0) throw Error(Errc::domain_error, "Neumann function is singular at 0");
  if (std::abs(x) <= series_radius && !(x.imag() >= std::max(2.0, std::abs(x.real())))) {
    cplx y0 = detail::y_series(0, x);
    cplx y1 = detail::y_series(1, x);
    if (n == 0) return y0;
    for (int k = 1; k < n; ++k) {
      const cplx y2 = (2.0 * k / x) * y1 - y0;
      y0 = y1;
      y1 = y2;
    }
    return y1;
  }
  return (hankel1(n, x) - bessel_j(n, x)) / I;
}

// Derivatives via J_n' = (J_{n-1} - J_{n+1})/2 and J_0' = -J_1 (same for Y, H).
inline cplx bessel_j_prime(int n, cplx x) {
  if (n == 0) return -bessel_j(1, x);
  return 0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x));
}

inline cplx bessel_y_prime(int n, cplx x) {
  if (n == 0) return -bessel_y(1, x);
  return 0.5 * (bessel_y(n - 1, x) - bessel_y(n + 1, x));
}

struct Bessel01 {
  cplx j0, j1, h0, h1;
};

// J_0, J_1, H^(1)_0, H^(1)_1 at one argument, sharing the work; used by the layer kernels.
inline Bessel01 bessel01(cplx x) {
  detail::check_range(1, x);
  if (x == 0.0) throw Error(Errc::domain_error, "Hankel function is singular at 0");
  Bessel01 b;
  if (std::abs(x) <= series_radius) {
    b.j0 = detail::j_series(0, x);
    b.j1 = detail::j_series(1, x);
  } else {
    const auto j = detail::j_miller(1, x);
    b.j0 = j[0];
    b.j1 = j[1];
  }
  detail::hankel1_01(x, b.h0, b.h1);
  return b;
}

// E_dim(z; x) for the operator -Delta - z, dim in {2, 3}.
inline cplx fundamental_solution(int dim, cplx z, std::span<const double> x) {
  if (dim != 2 && dim != 3) throw Error(Errc::domain_error, "dimension must be 2 or 3");
  if (std::ssize(x) != dim) throw Error(Errc::domain_error, "point has wrong dimension");
  double r2 = 0.0;
  for (double c : x) r2 += c * c;
  const double r = std::sqrt(r2);
  if (r == 0.0) throw Error(Errc::domain_error, "fundamental solution is singular at 0");
  if (dim == 2) {
    if (z == 0.0) return -std::log(r) / (2.0 * pi);
    return 0.25 * I * hankel1(0, sqrt_branch(z) * r);
  }
  // Half-integer Hankel function in closed form; surface area of the unit sphere is 4 pi.
  if (z == 0.0) return 1.0 / (4.0 * pi * r);
  return std::exp(I * sqrt_branch(z) * r) / (4.0 * pi * r);
}

// d/dr of the radial profile of E_2(z; .) at distance r > 0.
inline cplx fundamental_solution_2d_dr(cplx z, double r) {
  if (r == 0.0) throw Error(Errc::domain_error, "fundamental solution is singular at 0");
  if (z == 0.0) return -1.0 / (2.0 * pi * r);
  const cplx k = sqrt_branch(z);
  return -0.25 * I * k * hankel1(1, k * r);
}

}  // namespace kreinlab::specfun
