#pragma once

#include <stdexcept>
#include <string>

namespace eeopt {

// Argument outside the mathematical domain of an operation (negative rate, d <= 0, ...).
class domain_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// A quadrature or Monte Carlo evaluation produced a non-finite value.
class numerical_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Root bracketing or bisection failed; the message carries the last bracket.
class solver_error : public std::runtime_error {
public:
  solver_error(const std::string& what, double lo, double hi)
      : std::runtime_error(what + " (bracket [" + std::to_string(lo) + ", " + std::to_string(hi) + "])"),
        lo_(lo), hi_(hi) {}

  // Prefixes context to an existing message without repeating the bracket.
  solver_error(const std::string& context, const solver_error& inner)
      : std::runtime_error(context + ": " + inner.what()), lo_(inner.lo_), hi_(inner.hi_) {}

  double bracket_lo() const noexcept { return lo_; }
  double bracket_hi() const noexcept { return hi_; }

private:
  double lo_;
  double hi_;
};

// The decision function never turned positive below the doubling cap.
class unbounded_root_error : public solver_error {
public:
  using solver_error::solver_error;
};

// Invalid run configuration; the message names the offending key.
class config_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void check_positive(double v, const char* name) {
  if (!(v > 0.0)) throw domain_error(std::string(name) + " must be positive, got " + std::to_string(v));
}

inline void check_non_negative(double v, const char* name) {
  if (!(v >= 0.0)) throw domain_error(std::string(name) + " must be non-negative, got " + std::to_string(v));
}

} // namespace detail
} // namespace eeopt
