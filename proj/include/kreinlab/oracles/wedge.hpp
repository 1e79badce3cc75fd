#pragma once

// Corner singular function of a re-entrant wedge of opening omega in (pi, 2 pi):
// v(r, theta) = cutoff(r) r^{pi/omega} sin(pi theta / omega).

#include <cmath>

#include "kreinlab/error.hpp"
#include "kreinlab/linalg.hpp"

namespace kreinlab::oracles {

struct WedgeMode {
  double opening = 1.5 * pi;
  double inner = 0.25;  // cutoff is 1 for r <= inner
  double outer = 0.5;   // and 0 for r >= outer

  explicit WedgeMode(double omega = 1.5 * pi) : opening(omega) {
    if (!(omega > pi && omega < 2.0 * pi)) throw Error(Errc::spec_invalid, "wedge opening must lie in (pi, 2 pi)");
  }

  double exponent() const { return pi / opening; }

  // C-infinity step from 1 to 0 on [inner, outer].
  double cutoff(double r) const {
    if (r <= inner) return 1.0;
    if (r >= outer) return 0.0;
    const double s = (r - inner) / (outer - inner);
    const double a = std::exp(-1.0 / s), b = std::exp(-1.0 / (1.0 - s));
    return b / (a + b);
  }
};

inline double wedge_singular_function(const WedgeMode& mode, double r, double theta) {
  if (r <= 0.0) return 0.0;
  const double a = mode.exponent();
  return mode.cutoff(r) * std::pow(r, a) * std::sin(a * theta);
}

}  // namespace kreinlab::oracles
