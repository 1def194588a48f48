#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "eeopt/root_finding.hpp"
#include "eeopt/channel_stats.hpp"
#include "eeopt/errors.hpp"

namespace eeopt {

/// What the transmitter knows about the channel.
enum class ChannelCase {
  StaticCsit, // static channel, gain known
  FadingCdit, // fading channel, only the gain distribution known: constant power
  FadingCsit, // fading channel, instantaneous gain known: water-filling
};

inline constexpr ChannelCase all_channel_cases[] = {ChannelCase::StaticCsit, ChannelCase::FadingCdit,
                                                    ChannelCase::FadingCsit};

inline std::string_view to_string(ChannelCase c) {
  switch (c) {
  case ChannelCase::StaticCsit: return "static_csit";
  case ChannelCase::FadingCdit: return "fading_cdit";
  case ChannelCase::FadingCsit: return "fading_csit";
  }
  return "unknown";
}

inline std::optional<ChannelCase> parse_channel_case(std::string_view s) {
  for (ChannelCase c : all_channel_cases)
    if (to_string(c) == s) return c;
  return std::nullopt;
}

// Static channels need a fixed gain. Fading cases accept a fixed gain as a point-mass
// distribution.
inline void check_compatible(ChannelCase c, const GainModel& gain) {
  if (c == ChannelCase::StaticCsit && !gain.is_fixed())
    throw domain_error("static_csit requires a fixed channel gain");
}

/// Constant transmit power p* meeting E[log2(1 + G p*)] = C.
struct ConstantPowerSolution {
  double power;       // normalized by noise power
  double mean_slope;  // E[G / (1 + G p*)]
  double rate_check;
};

/// Water-filling p(G) = [mu*/ln2 - 1/G]^+ meeting E[log2(1 + G p(G))] = C.
struct WaterFillingSolution {
  double mu_star;
  double avg_power;
  double rate_check;

  double cutoff_gain() const { return std::numbers::ln2 / mu_star; }
  double power_at(double gain) const { return std::max(mu_star / std::numbers::ln2 - 1.0 / gain, 0.0); }
};

namespace detail {

inline GainRule full_rule(const GainModel& gain, const ExpectationSpec& spec) {
  if (const auto* q = std::get_if<ExpectationSpec::Quadrature>(&spec.method)) return gain_rule(gain, q->order);
  if (gain.is_fixed()) return gain_rule(gain, 8);
  // Sampled gains as an equal-weight rule, so the inner solvers see a fixed discrete
  // distribution (common random numbers across iterations).
  const auto& mc = std::get<ExpectationSpec::MonteCarlo>(spec.method);
  GainRule rule;
  rule.gains.resize(mc.samples);
  rule.weights.assign(mc.samples, 1.0 / static_cast<double>(mc.samples));
  std::mt19937_64 rng(mc.seed);
  std::gamma_distribution<double> dist(gain.shape(), gain.scale());
  for (auto& g : rule.gains) g = dist(rng);
  return rule;
}

inline void check_rate(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw domain_error("spectral efficiency must be finite and >= 0");
}

} // namespace detail

inline ConstantPowerSolution solve_constant_power(const GainModel& gain, double c, const ExpectationSpec& spec) {
  detail::check_rate(c);
  const GainRule rule = detail::full_rule(gain, spec);
  const double ref = gain.mean_gain();
  if (c == 0.0) return {0.0, rule.integrate([](double g) { return g; }), 0.0};

  // Unknown x = p * mean_gain, solved for in z = log2(1 + x): Jensen puts the root at or
  // just above C, so the doubling bracket starts there and stays short at any gain scale.
  auto rate = [&](double x) {
    return rule.integrate([&](double g) { return std::log2(1.0 + g / ref * x); });
  };
  auto eval = [&](double z) {
    const double x = std::expm1(z * std::numbers::ln2);
    ResidualSlope out{-c, 0.0};
    for (std::size_t i = 0; i < rule.gains.size(); ++i) {
      const double a = rule.gains[i] / ref;
      out.residual += rule.weights[i] * std::log2(1.0 + a * x);
      out.slope += rule.weights[i] * a / (1.0 + a * x);
    }
    out.slope *= 1.0 + x; // d/dz = (1 + x) ln2 d/dx, and d rate/dx carries 1/ln2
    return out;
  };
  const BracketedRoot r = expand_and_newton(eval, spec.rel_tol, 1e300, std::max(1.0, c));
  const double root_x = std::expm1(r.root * std::numbers::ln2);
  const double p = root_x / ref;
  const double slope = rule.integrate([&](double g) { return g / (1.0 + g * p); });
  const double achieved = rate(root_x);
  if (!std::isfinite(slope) || !std::isfinite(achieved))
    throw numerical_error("constant-power solution is not finite at C = " + std::to_string(c));
  return {p, slope, achieved};
}

inline WaterFillingSolution solve_water_filling(const GainModel& gain, double c, const ExpectationSpec& spec) {
  detail::check_rate(c);
  const double ref = gain.mean_gain();
  if (c == 0.0) {
    // mu* -> ln2 / sup G: zero for unbounded fading, ln2/G for a point mass.
    return {gain.is_fixed() ? std::numbers::ln2 / ref : 0.0, 0.0, 0.0};
  }

  const auto* quad = std::get_if<ExpectationSpec::Quadrature>(&spec.method);
  const std::optional<GainRule> shared = quad ? std::nullopt : std::optional(detail::full_rule(gain, spec));

  // level = (mu*/ln2) * mean_gain; the allocation is active for G > mean_gain / level.
  // Quadrature rebuilds its nodes above the cutoff so the kink sits on the boundary.
  struct Moments {
    double rate, power, active; // active = P(G > cutoff)
  };
  auto moments = [&](double level) {
    const double lambda = level / ref;
    const double cutoff = ref / level;
    Moments m{0.0, 0.0, 0.0};
    auto add = [&](double g, double w, double log2_g_lambda) {
      if (g <= cutoff) return;
      m.rate += w * log2_g_lambda;
      m.power += w * (lambda - 1.0 / g);
      m.active += w;
    };
    if (!quad) {
      for (std::size_t i = 0; i < shared->gains.size(); ++i)
        add(shared->gains[i], shared->weights[i], std::log2(shared->gains[i] * lambda));
    } else if (gain.is_fixed()) {
      add(ref, 1.0, std::log2(ref * lambda));
    } else {
      // g lambda = t * scale * lambda with t the normalized node.
      const double offset = std::log2(gain.scale() * lambda);
      detail::for_each_gamma_node(gain.shape(), gain.scale(), quad->order, cutoff / gain.scale(),
                                  [&](double g, double w, double log_t) { add(g, w, log_t / std::numbers::ln2 + offset); });
    }
    return m;
  };

  // Solved in z = log2(1 + level). d rate/d level = P(G > cutoff) / (level ln2); the
  // boundary term vanishes because the integrand is zero at the cutoff.
  auto eval = [&](double z) {
    const double level = std::expm1(z * std::numbers::ln2);
    const Moments m = moments(level);
    return ResidualSlope{m.rate - c, m.active * (1.0 + level) / level};
  };
  // z tracks C to within a shape-dependent offset once the level is large.
  const BracketedRoot r = expand_and_newton(eval, spec.rel_tol, 1e300, std::max(1.0, c));
  const double level = std::expm1(r.root * std::numbers::ln2);
  const Moments m = moments(level);
  if (!std::isfinite(m.power) || !std::isfinite(m.rate))
    throw numerical_error("water-filling solution is not finite at C = " + std::to_string(c));
  return {level / ref * std::numbers::ln2, m.power, m.rate};
}

/// psi(C) and psi'(C) from one inner solve. f(C) = C psi'(C) - psi(C).
struct MinPowerPoint {
  double c;
  double psi;
  double psi_prime;

  double tangent_gap() const { return c == 0.0 ? 0.0 : c * psi_prime - psi; }
};

inline MinPowerPoint evaluate_min_power(ChannelCase which, const GainModel& gain, double c,
                                        const ExpectationSpec& spec) {
  detail::check_rate(c);
  check_compatible(which, gain);
  switch (which) {
  case ChannelCase::StaticCsit: {
    const double g = gain.mean_gain();
    return {c, std::expm1(c * std::numbers::ln2) / g, std::numbers::ln2 * std::exp2(c) / g};
  }
  case ChannelCase::FadingCdit: {
    const ConstantPowerSolution s = solve_constant_power(gain, c, spec);
    return {c, s.power, std::numbers::ln2 / s.mean_slope};
  }
  case ChannelCase::FadingCsit: {
    const WaterFillingSolution s = solve_water_filling(gain, c, spec);
    return {c, s.avg_power, s.mu_star};
  }
  }
  throw domain_error("unknown channel case");
}

// Minimum transmit power over noise power needed for spectral efficiency C.
inline double min_power(ChannelCase which, const GainModel& gain, double c, const ExpectationSpec& spec) {
  if (c == 0.0) {
    detail::check_rate(c);
    check_compatible(which, gain);
    return 0.0;
  }
  return evaluate_min_power(which, gain, c, spec).psi;
}

inline double min_power_derivative(ChannelCase which, const GainModel& gain, double c,
                                   const ExpectationSpec& spec) {
  return evaluate_min_power(which, gain, c, spec).psi_prime;
}

inline double min_power_tangent_gap(ChannelCase which, const GainModel& gain, double c,
                                    const ExpectationSpec& spec) {
  if (which == ChannelCase::StaticCsit) {
    detail::check_rate(c);
    check_compatible(which, gain);
    // ((ln2 C - 1) 2^C + 1) / G
    const double x = c * std::numbers::ln2;
    return ((x - 1.0) * std::exp2(c) + 1.0) / gain.mean_gain();
  }
  return evaluate_min_power(which, gain, c, spec).tangent_gap();
}

} // namespace eeopt
