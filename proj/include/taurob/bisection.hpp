#pragma once

#include <cmath>
#include <sstream>

#include "taurob/errors.hpp"

namespace taurob {

// Solves f(x) == target for f strictly decreasing on (lower, inf) with
// f -> +inf at lower and f -> 0 at infinity.
//
// The bracket starts just above lower, the upper end doubles until f drops
// below target, then plain bisection runs until |f - target| <=
// value_tol * target or the bracket is relatively narrower than 1e-12.
// Scaling by target alone (not max(1, target)) keeps tiny tolerances honest.
template <typename F>
double solve_decreasing(F&& f, double lower, double target, double value_tol) {
  const double scale = target;
  double lo = lower * (1.0 + 1e-12) + 1e-300;
  const double f_lo = f(lo);
  if (f_lo < target) {
    std::ostringstream out;
    out.precision(17);
    out << "cannot bracket tolerance " << target << ": curve only reaches " << f_lo
        << " at the feasibility bound " << lo;
    throw BracketFailure(out.str());
  }
  if (std::abs(f_lo - target) <= value_tol * scale) return lo;

  double hi = 2.0 * lo;
  double f_hi = f(hi);
  while (f_hi >= target) {
    if (std::abs(f_hi - target) <= value_tol * scale) return hi;
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) {
      throw BracketFailure("cannot bracket tolerance: curve stays above it for all multipliers");
    }
    f_hi = f(hi);
  }

  double best = hi;
  double best_err = std::abs(f_hi - target);
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    const double err = std::abs(f_mid - target);
    if (err < best_err) {
      best = mid;
      best_err = err;
    }
    if (err <= value_tol * scale) return mid;
    (f_mid > target ? lo : hi) = mid;
  }
  return best;
}

}  // namespace taurob
