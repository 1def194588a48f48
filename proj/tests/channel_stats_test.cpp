#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "eeopt/channel_stats.hpp"
#include "test_support.hpp"

using namespace eeopt;
namespace oracle = eeopt::testing::oracle;

TEST(MeanGain, DistanceExamples) {
  EXPECT_DOUBLE_EQ(mean_gain_from_distance(1.0, 1e-7), 1e-7);
  EXPECT_NEAR(mean_gain_from_distance(10.0, 1e-7, 3.5), 3.1622776601683794e-11, 1e-24);
  EXPECT_NEAR(mean_gain_from_distance(100.0, 1e-7, 3.5), 1e-14, 1e-27);
  EXPECT_THROW(mean_gain_from_distance(0.0, 1e-7), domain_error);
  EXPECT_THROW(mean_gain_from_distance(-5.0, 1e-7), domain_error);
  EXPECT_THROW(mean_gain_from_distance(5.0, 0.0), domain_error);
}

TEST(GainModel, Validation) {
  EXPECT_THROW(GainModel::fixed(0.0), domain_error);
  EXPECT_THROW(GainModel::nakagami(0.49, 1.0), domain_error);
  EXPECT_THROW(GainModel::nakagami(1.0, -1.0), domain_error);
  const auto g = GainModel::nakagami(2.5, 4.0);
  EXPECT_DOUBLE_EQ(g.scale(), 1.6);
  EXPECT_DOUBLE_EQ(g.mean_gain(), 4.0);
}

TEST(ExpectationSpec, Validation) {
  EXPECT_THROW(ExpectationSpec::quadrature(7), domain_error);
  EXPECT_NO_THROW(ExpectationSpec::quadrature(8));
  EXPECT_THROW(ExpectationSpec::monte_carlo(999, 1), domain_error);
  EXPECT_THROW(ExpectationSpec::quadrature(64, 0.0), domain_error);
}

TEST(Expect, Examples) {
  const auto q = ExpectationSpec::quadrature();
  auto identity = [](double g) { return g; };
  EXPECT_EQ(expect(GainModel::fixed(2.0), identity, q), 2.0);
  EXPECT_NEAR(expect(GainModel::rayleigh(5.0), identity, q), 5.0, 5e-12);
  EXPECT_NEAR(expect(GainModel::rayleigh(1.0), [](double g) { return g * g; }, q), 2.0, 2e-11);
}

TEST(Expect, SecondMomentMonteCarloCrossCheck) {
  const auto mc = expect_with_error(GainModel::rayleigh(1.0), [](double g) { return g * g; },
                                    ExpectationSpec::monte_carlo(1'000'000, 42));
  EXPECT_NEAR(mc.value, 2.0, 4.0 * mc.std_error);
}

TEST(Expect, ConstantsIntegrateExactly) {
  for (double m : {0.5, 1.0, 2.0, 7.3, 30.0}) {
    for (int order : {8, 64, 256}) {
      const double v = expect(GainModel::nakagami(m, 1e-11), [](double) { return 3.25; },
                              ExpectationSpec::quadrature(order));
      EXPECT_NEAR(v, 3.25, 4 * std::numeric_limits<double>::epsilon() * 3.25) << "m=" << m << " order=" << order;
    }
  }
}

TEST(Expect, MomentsOfGammaMatchClosedForm) {
  // E[G^k] = scale^k Gamma(m+k)/Gamma(m). Polynomial growth costs accuracy at m = 0.5
  // (widest window); ~1e-10 relative at order 256.
  for (double m : {0.5, 1.0, 3.0}) {
    const auto g = GainModel::nakagami(m, 2.0);
    for (int k : {1, 2, 3}) {
      const double exact = std::pow(g.scale(), k) * std::exp(std::lgamma(m + k) - std::lgamma(m));
      EXPECT_NEAR(expect(g, [&](double x) { return std::pow(x, k); }, ExpectationSpec::quadrature()), exact,
                  1e-9 * exact);
    }
  }
}

TEST(Expect, RateMatchesIndependentOracles) {
  const auto q = ExpectationSpec::quadrature();
  for (double a : {1e-2, 1.0, 1e2, 1e4, 1e6}) {
    const double rate = expect(GainModel::rayleigh(1.0), [&](double g) { return std::log2(1.0 + a * g); }, q);
    EXPECT_NEAR(rate, oracle::rayleigh_rate(a), 1e-10 * oracle::rayleigh_rate(a)) << "a=" << a;
  }
  for (double m : {0.5, 2.0, 4.0}) {
    for (double a : {1e-2, 1.0, 1e4}) {
      const auto g = GainModel::nakagami(m, 1.0);
      const double rate = expect(g, [&](double x) { return std::log2(1.0 + a * x); }, q);
      const double ref = oracle::gamma_rate(m, a * g.scale());
      EXPECT_NEAR(rate, ref, 1e-9 * ref) << "m=" << m << " a=" << a;
    }
  }
}

TEST(Expect, DeterministicForSameSpec) {
  const auto g = GainModel::nakagami(1.7, 3e-11);
  auto f = [](double x) { return std::log2(1.0 + 1e11 * x); };
  const auto q = ExpectationSpec::quadrature(128);
  EXPECT_EQ(expect(g, f, q), expect(g, f, q));
  const auto mc = ExpectationSpec::monte_carlo(5000, 99);
  EXPECT_EQ(expect(g, f, mc), expect(g, f, mc));
  EXPECT_NE(expect(g, f, mc), expect(g, f, ExpectationSpec::monte_carlo(5000, 100)));
}

TEST(Expect, NonFiniteIntegrandIsReported) {
  const auto g = GainModel::rayleigh(1.0);
  auto bad = [](double) { return std::numeric_limits<double>::quiet_NaN(); };
  EXPECT_THROW(expect(g, bad, ExpectationSpec::quadrature()), numerical_error);
  EXPECT_THROW(expect(g, bad, ExpectationSpec::monte_carlo(1000, 1)), numerical_error);
  EXPECT_THROW(expect(GainModel::fixed(1.0), [](double) { return INFINITY; }, ExpectationSpec::quadrature()),
               numerical_error);
}

TEST(Expect, ThresholdedIntegralHandlesKink) {
  // E[(G - 1)^+] under Exp(1) is e^-1.
  const auto g = GainModel::rayleigh(1.0);
  const auto v = expect_with_error(g, [](double x) { return x - 1.0; }, ExpectationSpec::quadrature(), 1.0);
  EXPECT_NEAR(v.value, std::exp(-1.0), 1e-12);
}

TEST(Expect, JensenGapShrinksWithShape) {
  const double gbar = 3e-11;
  const auto q = ExpectationSpec::quadrature();
  for (double e = -4.0; e <= 4.0; e += 0.5) {
    const double p = std::pow(10.0, e) / gbar;
    const double bound = std::log2(1.0 + gbar * p);
    double prev_gap = std::numeric_limits<double>::infinity();
    for (double m : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      const double rate = expect(GainModel::nakagami(m, gbar), [&](double g) { return std::log2(1.0 + g * p); }, q);
      const double gap = bound - rate;
      EXPECT_GT(gap, 0.0);
      EXPECT_LT(gap, prev_gap) << "p*gbar=" << gbar * p << " m=" << m;
      prev_gap = gap;
    }
  }
}
