#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "eeopt/root_finding.hpp"
#include "eeopt/channel_stats.hpp"
#include "eeopt/circuit_power.hpp"
#include "eeopt/errors.hpp"
#include "eeopt/min_power.hpp"

namespace eeopt {

/// Complete link description. All quantities are linear SI units.
struct LinkParams {
  double bandwidth_hz;
  double noise_power_w;
  double pa_efficiency;
  double kappa;          // W per unit of circuit power factor
  double static_power_w; // P_c
  ChannelCase channel_case;
  GainModel gain;
  CircuitPowerModel circuit = CircuitPowerModel::linear();
  ExpectationSpec expectation = {};

  void validate() const {
    detail::check_positive(bandwidth_hz, "bandwidth");
    detail::check_positive(noise_power_w, "noise power");
    if (!(pa_efficiency > 0.0 && pa_efficiency <= 1.0)) throw domain_error("PA efficiency must lie in (0, 1]");
    detail::check_non_negative(kappa, "kappa");
    detail::check_positive(static_power_w, "static circuit power");
    check_compatible(channel_case, gain);
    expectation.validate();
  }

  // sigma^2 / xi: converts normalized transmit power into drawn Watts.
  double power_scale() const { return noise_power_w / pa_efficiency; }
};

/// One sample of the EE-SE tradeoff.
struct EeSePoint {
  double c;
  double total_power_w;
  double ee_j_per_bit; // +inf at C = 0
  double gamma_w;
};

struct OptimumResult {
  double c_star;
  double ee_star;
  int iterations;     // bisection steps
  int doubling_steps; // bracket expansions
  double final_bracket_width;
};

struct OptimizerOptions {
  double delta = 1e-8;
  double c_cap = 64.0; // doubling stops here with unbounded_root_error
};

inline EeSePoint evaluate_point(const LinkParams& p, double c) {
  const double rate = p.bandwidth_hz * c;
  if (c == 0.0) {
    detail::check_rate(c);
    check_compatible(p.channel_case, p.gain);
    return {0.0, p.static_power_w, std::numeric_limits<double>::infinity(), -p.static_power_w};
  }
  const MinPowerPoint mp = evaluate_min_power(p.channel_case, p.gain, c, p.expectation);
  const double f = p.channel_case == ChannelCase::StaticCsit
                       ? min_power_tangent_gap(p.channel_case, p.gain, c, p.expectation)
                       : mp.tangent_gap();
  const double total = p.kappa * p.circuit.value(rate) + p.power_scale() * mp.psi + p.static_power_w;
  const double gamma = p.kappa * p.circuit.tangent_gap(rate) + p.power_scale() * f - p.static_power_w;
  return {c, total, total / rate, gamma};
}

/// P(C) = kappa phi(W C) + (sigma^2 / xi) psi(C) + P_c.
inline double total_power(const LinkParams& p, double c) {
  const double psi = min_power(p.channel_case, p.gain, c, p.expectation);
  return p.kappa * p.circuit.value(p.bandwidth_hz * c) + p.power_scale() * psi + p.static_power_w;
}

/// Energy per bit P(C) / (W C), +inf at C = 0.
inline double energy_per_bit(const LinkParams& p, double c) {
  const double total = total_power(p, c);
  if (c == 0.0) return std::numeric_limits<double>::infinity();
  return total / (p.bandwidth_hz * c);
}

/// Gamma(C) = kappa g(W C) + (sigma^2 / xi) f(C) - P_c. Negative below the optimum
/// spectral efficiency, positive above.
inline double decision_function(const LinkParams& p, double c) {
  const double f = min_power_tangent_gap(p.channel_case, p.gain, c, p.expectation);
  return p.kappa * p.circuit.tangent_gap(p.bandwidth_hz * c) + p.power_scale() * f - p.static_power_w;
}

/// Bisection on the sign of Gamma: bracket [0, 1], double the upper end while Gamma < 0,
/// then halve until the bracket is at most delta wide.
inline OptimumResult optimize(const LinkParams& p, const OptimizerOptions& opt = {}) {
  p.validate();
  if (!(opt.delta > 0.0)) throw domain_error("delta must be positive");

  double lo = 0.0;
  double hi = 1.0;
  int doublings = 0;
  while (decision_function(p, hi) < 0.0) {
    if (hi >= opt.c_cap)
      throw unbounded_root_error("decision function still negative at the spectral-efficiency cap", lo, hi);
    hi = std::min(2.0 * hi, opt.c_cap);
    ++doublings;
  }

  // |Gamma| below this counts as an exact zero.
  const double zero_band = 1e-14 * p.static_power_w;
  double c = 0.5 * (lo + hi);
  int iterations = 0;
  bool exact = false;
  while (hi - lo > opt.delta) {
    c = 0.5 * (lo + hi);
    ++iterations;
    const double gamma = decision_function(p, c);
    if (std::abs(gamma) <= zero_band) {
      exact = true;
      break;
    }
    if (gamma > 0.0)
      hi = c;
    else
      lo = c;
  }
  if (!exact) c = 0.5 * (lo + hi);
  return {c, energy_per_bit(p, c), iterations, doublings, hi - lo};
}

/// Optimum spectral efficiency as kappa -> 0: the root of (sigma^2/xi) f(C) = P_c.
/// Equals optimize().c_star for a linear circuit model at any kappa.
inline double limit_se_kappa_zero(const LinkParams& p, const OptimizerOptions& opt = {}) {
  LinkParams q = p;
  q.kappa = 0.0;
  return optimize(q, opt).c_star;
}

/// How the circuit tangent gap is evaluated in the noise -> 0 limit equation.
enum class RateArgument {
  Scaled, // kappa g(W C) = P_c, consistent with the decision function
  Raw,    // kappa g(C) = P_c, the bare-C form
};

/// Optimum spectral efficiency as sigma^2 -> 0: the root of kappa g(W C) = P_c.
/// Needs kappa > 0 and a strictly convex circuit model; otherwise g == 0 has no root.
inline double limit_se_noise_zero(const LinkParams& p, RateArgument arg = RateArgument::Scaled,
                                  const OptimizerOptions& opt = {}) {
  p.validate();
  if (!(p.kappa > 0.0) || !p.circuit.strictly_convex())
    throw unbounded_root_error("kappa g(W C) = P_c has no finite root (kappa = 0 or linear circuit power)", 0.0,
                               std::numeric_limits<double>::infinity());
  const double w = arg == RateArgument::Scaled ? p.bandwidth_hz : 1.0;
  auto residual = [&](double c) { return p.kappa * p.circuit.tangent_gap(w * c) - p.static_power_w; };
  const BracketedRoot r = expand_and_bisect(residual, 0.0, opt.delta, opt.c_cap);
  return r.root;
}

/// EE-SE samples over a non-decreasing grid of C >= 0.
inline std::vector<EeSePoint> tradeoff_curve(const LinkParams& p, std::span<const double> c_grid) {
  p.validate();
  for (std::size_t i = 0; i < c_grid.size(); ++i) {
    detail::check_rate(c_grid[i]);
    if (i > 0 && !(c_grid[i] > c_grid[i - 1])) throw domain_error("tradeoff grid must be strictly increasing");
  }
  std::vector<EeSePoint> out;
  out.reserve(c_grid.size());
  for (double c : c_grid) out.push_back(evaluate_point(p, c));
  return out;
}

struct GridOptimum {
  double c_best;
  double ee_best;
};

/// Exhaustive minimum of EE over {step, 2 step, ..., c_max}. Validation oracle for optimize().
inline GridOptimum grid_oracle(const LinkParams& p, double c_max, double step) {
  p.validate();
  detail::check_positive(step, "grid step");
  if (!(c_max > step)) throw domain_error("grid c_max must exceed the step");
  const auto n = static_cast<long>(std::floor(c_max / step + 1e-9));
  GridOptimum best{0.0, std::numeric_limits<double>::infinity()};
  for (long k = 1; k <= n; ++k) {
    const double c = static_cast<double>(k) * step;
    const double ee = energy_per_bit(p, c);
    if (ee < best.ee_best) best = {c, ee};
  }
  return best;
}

} // namespace eeopt
