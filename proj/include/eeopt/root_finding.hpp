#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "eeopt/errors.hpp"

namespace eeopt {

struct BracketedRoot {
  double root;
  double lo;
  double hi;
  int doublings;
  int iterations;
};

/// Root of an increasing function with residual(0) < 0.
///
/// The bracket starts at [0, 1] and the upper end doubles until residual(hi) >= 0;
/// passing hi_cap throws solver_error. Bisection then runs until the bracket is
/// narrower than max(rel_tol * hi, abs_tol) or no representable midpoint remains.
template <class F>
BracketedRoot expand_and_bisect(F&& residual, double rel_tol, double abs_tol = 0.0, double hi_cap = 1e300) {
  double lo = 0.0;
  double hi = 1.0;
  int doublings = 0;
  while (residual(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    ++doublings;
    if (!(hi <= hi_cap)) throw solver_error("root bracket exceeded overflow guard", lo, hi);
  }

  int iterations = 0;
  while (hi - lo > std::max(rel_tol * hi, abs_tol)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double r = residual(mid);
    if (std::isnan(r)) throw solver_error("residual is NaN at " + std::to_string(mid), lo, hi);
    if (r < 0.0)
      lo = mid;
    else
      hi = mid;
    ++iterations;
  }
  return {0.5 * (lo + hi), lo, hi, doublings, iterations};
}

struct ResidualSlope {
  double residual;
  double slope;
};

/// Bracket expansion as in expand_and_bisect but starting from [0, start], then Newton
/// steps on the combined residual/slope functor. A step that leaves the bracket or fails
/// to halve it falls back to bisection, so the bracket always shrinks around a sign change.
template <class F>
BracketedRoot expand_and_newton(F&& eval, double rel_tol, double hi_cap = 1e300, double start = 1.0) {
  double lo = 0.0;
  double hi = start;
  int doublings = 0;
  ResidualSlope at_hi = eval(hi);
  std::optional<ResidualSlope> at_lo;
  while (at_hi.residual < 0.0) {
    lo = hi;
    at_lo = at_hi;
    hi *= 2.0;
    ++doublings;
    if (!(hi <= hi_cap)) throw solver_error("root bracket exceeded overflow guard", lo, hi);
    at_hi = eval(hi);
  }
  if (std::isnan(at_hi.residual)) throw solver_error("residual is NaN at " + std::to_string(hi), lo, hi);
  if (at_hi.residual == 0.0) return {hi, hi, hi, doublings, 0};

  // First iterate: Newton from the endpoint closer to the root, else the midpoint.
  auto newton_from = [&](double x0, const ResidualSlope& r) {
    return r.slope > 0.0 ? x0 - r.residual / r.slope : std::numeric_limits<double>::quiet_NaN();
  };
  double x = newton_from(hi, at_hi);
  if (at_lo && -at_lo->residual < at_hi.residual) x = newton_from(lo, *at_lo);
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  double step_before_last = hi - lo;
  double last_step = step_before_last;
  int iterations = 0;
  while (true) {
    const ResidualSlope r = eval(x);
    ++iterations;
    if (std::isnan(r.residual)) throw solver_error("residual is NaN at " + std::to_string(x), lo, hi);
    if (r.residual == 0.0) return {x, x, x, doublings, iterations};
    if (r.residual < 0.0)
      lo = std::max(lo, x);
    else
      hi = std::min(hi, x);
    if (hi - lo <= rel_tol * hi) break;

    double next = r.slope > 0.0 ? x - r.residual / r.slope : lo - 1.0;
    const bool newton_ok = next > lo && next < hi && std::abs(next - x) < 0.5 * step_before_last;
    if (!newton_ok) next = 0.5 * (lo + hi);
    step_before_last = last_step;
    last_step = std::abs(next - x);
    if (newton_ok && last_step <= 0.25 * rel_tol * std::abs(next)) {
      x = next;
      break;
    }
    if (next <= lo || next >= hi) break; // no representable interior point left
    x = next;
    if (iterations > 400) throw solver_error("Newton-bisection did not converge", lo, hi);
  }
  return {x, lo, hi, doublings, iterations};
}

} // namespace eeopt
