#pragma once

#include <cmath>

#include "eeopt/errors.hpp"

namespace eeopt {

/// Rate-dependent circuit power factor phi(R). The circuit draws kappa * phi(R) Watts
/// at rate R bits/s. Both supported forms satisfy phi(0) = 0 and are increasing and
/// convex on R >= 0.
///
/// tangent_gap(R) = R phi'(R) - phi(R) is the circuit-side term of the optimality
/// decision function; it vanishes identically for the linear model.
class CircuitPowerModel {
public:
  enum class Kind { Linear, PowerLaw };

  static CircuitPowerModel linear() { return CircuitPowerModel(Kind::Linear, 1.0); }

  // Rejects alpha < 1, which would make phi concave.
  static CircuitPowerModel power_law(double alpha) {
    if (!(alpha >= 1.0) || !std::isfinite(alpha))
      throw domain_error("power-law circuit exponent must be >= 1, got " + std::to_string(alpha));
    return CircuitPowerModel(Kind::PowerLaw, alpha);
  }

  Kind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }

  // Linear is tangent_gap == 0 everywhere, so alpha == 1 counts as well.
  bool strictly_convex() const noexcept { return kind_ == Kind::PowerLaw && alpha_ > 1.0; }

  double value(double rate) const {
    detail::check_non_negative(rate, "rate");
    if (kind_ == Kind::Linear) return rate;
    return std::pow(rate, alpha_);
  }

  double derivative(double rate) const {
    detail::check_non_negative(rate, "rate");
    if (kind_ == Kind::Linear) return 1.0;
    if (rate == 0.0) return alpha_ == 1.0 ? 1.0 : 0.0;
    return alpha_ * std::pow(rate, alpha_ - 1.0);
  }

  // Closed form (alpha - 1) R^alpha; avoids cancellation in R phi' - phi near alpha = 1.
  double tangent_gap(double rate) const {
    detail::check_non_negative(rate, "rate");
    if (kind_ == Kind::Linear) return 0.0;
    return (alpha_ - 1.0) * std::pow(rate, alpha_);
  }

  friend bool operator==(const CircuitPowerModel&, const CircuitPowerModel&) = default;

private:
  CircuitPowerModel(Kind kind, double alpha) : kind_(kind), alpha_(alpha) {}

  Kind kind_;
  double alpha_;
};

} // namespace eeopt
