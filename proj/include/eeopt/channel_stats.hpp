#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "eeopt/errors.hpp"

namespace eeopt {

/// Average channel power gain at distance d under the power-law path-loss model
/// G0 * d^(-path_exponent), all in linear units.
inline double mean_gain_from_distance(double distance_m, double g0, double path_exponent = 3.5) {
  detail::check_positive(distance_m, "distance");
  detail::check_positive(g0, "reference gain G0");
  return g0 * std::pow(distance_m, -path_exponent);
}

struct FixedGain {
  double gain;
};

// |h| Nakagami-m with E|h|^2 = mean_gain, so G = |h|^2 ~ Gamma(shape = m, scale = mean_gain / m).
struct NakagamiGain {
  double m;
  double mean_gain;
};

/// Channel power gain G: a fixed value or a Nakagami-m fading distribution.
class GainModel {
public:
  static GainModel fixed(double gain) {
    detail::check_positive(gain, "fixed channel gain");
    return GainModel(FixedGain{gain});
  }

  static GainModel nakagami(double m, double mean_gain) {
    if (!(m >= 0.5)) throw domain_error("Nakagami shape m must be >= 0.5, got " + std::to_string(m));
    detail::check_positive(mean_gain, "mean channel gain");
    return GainModel(NakagamiGain{m, mean_gain});
  }

  static GainModel rayleigh(double mean_gain) { return nakagami(1.0, mean_gain); }

  bool is_fixed() const noexcept { return std::holds_alternative<FixedGain>(v_); }

  double mean_gain() const noexcept {
    if (const auto* f = std::get_if<FixedGain>(&v_)) return f->gain;
    return std::get<NakagamiGain>(v_).mean_gain;
  }

  // Gamma shape of G; not meaningful for a fixed gain.
  double shape() const { return std::get<NakagamiGain>(v_).m; }

  // G = scale() * t with t ~ Gamma(m, 1).
  double scale() const {
    const auto& n = std::get<NakagamiGain>(v_);
    return n.mean_gain / n.m;
  }

  const std::variant<FixedGain, NakagamiGain>& variant() const noexcept { return v_; }

private:
  explicit GainModel(std::variant<FixedGain, NakagamiGain> v) : v_(v) {}

  std::variant<FixedGain, NakagamiGain> v_;
};

/// How E_G[.] is evaluated.
///
/// Quadrature is the production path. Monte Carlo exists as a cross-check oracle and
/// is deterministic for a given seed. rel_tol is the relative tolerance requested of
/// solvers that sit on top of the expectations (inner bisections on power and water
/// level).
struct ExpectationSpec {
  struct Quadrature {
    int order = 256;
  };
  struct MonteCarlo {
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 0;
  };

  std::variant<Quadrature, MonteCarlo> method = Quadrature{};
  double rel_tol = 1e-12;

  static ExpectationSpec quadrature(int order = 256, double rel_tol = 1e-12) {
    ExpectationSpec s{Quadrature{order}, rel_tol};
    s.validate();
    return s;
  }

  static ExpectationSpec monte_carlo(std::uint64_t samples, std::uint64_t seed, double rel_tol = 1e-12) {
    ExpectationSpec s{MonteCarlo{samples, seed}, rel_tol};
    s.validate();
    return s;
  }

  void validate() const {
    if (const auto* q = std::get_if<Quadrature>(&method); q && q->order < 8)
      throw domain_error("quadrature order must be >= 8, got " + std::to_string(q->order));
    if (const auto* mc = std::get_if<MonteCarlo>(&method); mc && mc->samples < 1000)
      throw domain_error("Monte Carlo sample count must be >= 1000, got " + std::to_string(mc->samples));
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw domain_error("rel_tol must lie in (0, 1)");
  }
};

/// Nodes (in units of G) and weights such that sum_i w_i f(G_i) approximates
/// the integral of f(G) p(G) dG over G > threshold, p being the gain density.
struct GainRule {
  std::vector<double> gains;
  std::vector<double> weights;

  template <class F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < gains.size(); ++i) acc += weights[i] * f(gains[i]);
    return acc;
  }
};

namespace detail {

// Trapezoid rule in u = ln(t - t0) for the Gamma(m, 1) weight restricted to t > t0.
// The transformed integrand decays double-exponentially at the upper end and like
// e^(min(m,1) u) at the lower end, so the trapezoid converges geometrically in order.
// Window bounds leave < 1e-17 of the Gamma mass outside.
// Calls visit(gain, weight, ln t) for each node of the rule below; returns the weight sum.
template <class Visit>
double for_each_gamma_node(double m, double scale, int order, double t0, Visit&& visit) {
  const double lo = t0 > 0.0 ? std::max(-40.0 / m, std::log(t0) - 40.0) : -40.0 / m;
  const double hi = std::log(t0 + 40.0 + 4.0 * m);
  const double h = (hi - lo) / (order - 1);
  const double log_norm = std::lgamma(m);
  double total = 0.0;
  for (int i = 0; i < order; ++i) {
    const double u = lo + h * i;
    const double e = std::exp(u);
    const double t = t0 + e;
    const double log_t = std::log(t);
    const double w = h * std::exp((m - 1.0) * log_t - t + u - log_norm);
    visit(scale * t, w, log_t);
    total += w;
  }
  return total;
}

inline GainRule gamma_log_trapezoid(double m, double scale, int order, double t0) {
  GainRule rule;
  rule.gains.reserve(order);
  rule.weights.reserve(order);
  const double total = for_each_gamma_node(m, scale, order, t0, [&](double g, double w, double) {
    rule.gains.push_back(g);
    rule.weights.push_back(w);
  });
  // Full-support rules are renormalized so constants integrate exactly.
  if (t0 <= 0.0)
    for (auto& w : rule.weights) w /= total;
  return rule;
}

inline std::string describe_node(double gain) {
  std::ostringstream os;
  os.precision(17);
  os << "integrand is not finite at G = " << gain;
  return os.str();
}

} // namespace detail

/// Deterministic rule for the gain model. A fixed gain yields a single node with
/// unit weight (or none when the gain does not exceed the threshold).
inline GainRule gain_rule(const GainModel& model, int order, double threshold = 0.0) {
  if (order < 8) throw domain_error("quadrature order must be >= 8");
  if (model.is_fixed()) {
    const double g = model.mean_gain();
    if (g > threshold) return GainRule{{g}, {1.0}};
    return GainRule{};
  }
  return detail::gamma_log_trapezoid(model.shape(), model.scale(), order, threshold / model.scale());
}

struct Estimate {
  double value;
  double std_error; // 0 for deterministic rules
};

/// E_G[f(G) 1{G > threshold}], with a standard error when sampled.
template <class F>
Estimate expect_with_error(const GainModel& model, F&& f, const ExpectationSpec& spec, double threshold = 0.0) {
  if (model.is_fixed()) {
    const double g = model.mean_gain();
    const double v = g > threshold ? f(g) : 0.0;
    if (!std::isfinite(v)) throw numerical_error(detail::describe_node(g));
    return {v, 0.0};
  }

  if (const auto* q = std::get_if<ExpectationSpec::Quadrature>(&spec.method)) {
    const GainRule rule = gain_rule(model, q->order, threshold);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.gains.size(); ++i) {
      const double v = f(rule.gains[i]);
      if (!std::isfinite(v)) throw numerical_error(detail::describe_node(rule.gains[i]));
      acc += rule.weights[i] * v;
    }
    return {acc, 0.0};
  }

  const auto& mc = std::get<ExpectationSpec::MonteCarlo>(spec.method);
  std::mt19937_64 rng(mc.seed);
  std::gamma_distribution<double> dist(model.shape(), model.scale());
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t i = 0; i < mc.samples; ++i) {
    const double g = dist(rng);
    const double v = g > threshold ? f(g) : 0.0;
    if (!std::isfinite(v)) throw numerical_error(detail::describe_node(g));
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  const double n = static_cast<double>(mc.samples);
  return {mean, std::sqrt(m2 / (n - 1.0) / n)};
}

/// E_G[f(G)] under the gain model.
template <class F>
double expect(const GainModel& model, F&& f, const ExpectationSpec& spec) {
  return expect_with_error(model, std::forward<F>(f), spec).value;
}

} // namespace eeopt
