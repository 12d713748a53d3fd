#include <cmath>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "ktone/catalog.hpp"
#include "ktone/errors.hpp"
#include "support/gen.hpp"

using namespace ktone;
using ktone::testing::Gen;

namespace {

using Ranges = std::vector<std::pair<double, double>>;

// Closed ranges of p with x^p (resp. -x^p) k-tone on (0, inf), listed per k.
const std::map<int, Ranges> kPowerPlus = {
    {1, {{0, 1}}},
    {2, {{-1, 0}, {1, 2}}},
    {3, {{0, 1}, {2, 3}}},
    {4, {{-1, 0}, {1, 2}, {3, 4}}},
    {5, {{0, 1}, {2, 3}, {4, 5}}},
    {6, {{-1, 0}, {1, 2}, {3, 4}, {5, 6}}},
};
const std::map<int, Ranges> kPowerMinus = {
    {1, {{-1, 0}}},
    {2, {{0, 1}}},
    {3, {{-1, 0}, {1, 2}}},
    {4, {{0, 1}, {2, 3}}},
    {5, {{-1, 0}, {1, 2}, {3, 4}}},
    {6, {{0, 1}, {2, 3}, {4, 5}}},
};

using Sets = std::map<int, std::set<int>>;

// x^p log x and x^p (x - 1) / log x
const Sets kLogPlus = {{1, {0}}, {2, {1}}, {3, {0, 2}}, {4, {1, 3}}, {5, {0, 2, 4}}, {6, {1, 3, 5}}};
const Sets kLogMinus = {{1, {}}, {2, {0}}, {3, {1}}, {4, {0, 2}}, {5, {1, 3}}, {6, {0, 2, 4}}};
// x^p / (x + 1)
const Sets kRatPlus = {{1, {1}}, {2, {0, 2}}, {3, {1, 3}}, {4, {0, 2, 4}}, {5, {1, 3, 5}}, {6, {0, 2, 4, 6}}};
const Sets kRatMinus = {{1, {0}}, {2, {1}}, {3, {0, 2}}, {4, {1, 3}}, {5, {0, 2, 4}}, {6, {1, 3, 5}}};

bool in_ranges(const Ranges& r, double p) {
  for (auto [lo, hi] : r) {
    if (p >= lo && p <= hi) return true;
  }
  return false;
}

Tonicity verdict(bool plus, bool minus) {
  if (plus && minus) return Tonicity::both;
  if (plus) return Tonicity::plus;
  return minus ? Tonicity::minus : Tonicity::neither;
}

Tonicity from_sets(const Sets& plus, const Sets& minus, int k, double p) {
  bool integral = p == std::round(p);
  int q = static_cast<int>(std::lround(p));
  return verdict(integral && plus.at(k).count(q), integral && minus.at(k).count(q));
}

// Central 6th-order difference of deriv(m-1) at x.
double fd_next(const ScalarFunction& f, int m, double x, double h) {
  auto d = [&](double t) { return f.deriv(m - 1, t); };
  return (-d(x + 3 * h) + 9 * d(x + 2 * h) - 45 * d(x + h) + 45 * d(x - h) - 9 * d(x - 2 * h) + d(x - 3 * h)) /
         (-60 * h);
}

}  // namespace

TEST(CatalogTables, PowerMatchesTranscribedRanges) {
  std::vector<double> ps;
  for (int i = -12; i <= 32; ++i) ps.push_back(0.25 * i);
  ps.insert(ps.end(), {-1.3, 0.7, 2.2, 5.9, 6.5});
  for (int k = 1; k <= 6; ++k) {
    for (double p : ps) {
      Tonicity want = verdict(in_ranges(kPowerPlus.at(k), p), in_ranges(kPowerMinus.at(k), p));
      EXPECT_EQ(expected_tonicity(make_power(p), k), want) << "p=" << p << " k=" << k;
      EXPECT_EQ(power_plus(p, k), in_ranges(kPowerPlus.at(k), p));
      EXPECT_EQ(power_minus(p, k), in_ranges(kPowerMinus.at(k), p));
    }
  }
}

TEST(CatalogTables, PowerExamples) {
  EXPECT_EQ(expected_tonicity(make_power(0.5), 1), Tonicity::plus);
  EXPECT_EQ(expected_tonicity(make_power(-1), 2), Tonicity::plus);
  EXPECT_EQ(expected_tonicity(make_power(1.5), 1), Tonicity::neither);
  EXPECT_EQ(expected_tonicity(make_power(1.5), 3), Tonicity::minus);
  EXPECT_EQ(expected_tonicity(negate_entry(make_power(1.5)), 3), Tonicity::plus);
  EXPECT_EQ(expected_tonicity(negate_entry(make_power(-0.5)), 1), Tonicity::plus);
}

TEST(CatalogTables, PowerLogMatchesTranscribedSets) {
  for (int k = 1; k <= 6; ++k) {
    for (double p = -2.0; p <= 7.0; p += 0.5) {
      EXPECT_EQ(expected_tonicity(make_power_log(p), k), from_sets(kLogPlus, kLogMinus, k, p))
          << "p=" << p << " k=" << k;
    }
  }
  EXPECT_EQ(expected_tonicity(make_log(), 1), Tonicity::plus);
  EXPECT_EQ(expected_tonicity(make_log(), 2), Tonicity::minus);
}

TEST(CatalogTables, PowerOverXPlusOneMatchesTranscribedSets) {
  for (int k = 1; k <= 6; ++k) {
    for (double p = -2.0; p <= 7.0; p += 0.5) {
      EXPECT_EQ(expected_tonicity(make_power_over_x_plus_1(p), k), from_sets(kRatPlus, kRatMinus, k, p))
          << "p=" << p << " k=" << k;
    }
  }
}

TEST(CatalogTables, PowerLogmeanMatchesTranscribedSetsAndIsFlagged) {
  for (int k = 1; k <= 6; ++k) {
    for (double p = -2.0; p <= 7.0; p += 0.5) {
      EXPECT_EQ(expected_tonicity(make_power_logmean(p), k), from_sets(kLogPlus, kLogMinus, k, p))
          << "p=" << p << " k=" << k;
    }
  }
  EXPECT_TRUE(make_power_logmean(1).proof_omitted);
  EXPECT_FALSE(make_log().proof_omitted);
  EXPECT_EQ(expected_tonicity(make_logmean(), 1), Tonicity::plus);
}

TEST(CatalogTables, PolynomialAndMoebius) {
  EXPECT_EQ(expected_tonicity(make_polynomial({1, 2, 3}), 2), Tonicity::plus);
  EXPECT_EQ(expected_tonicity(make_polynomial({1, 2, -3}), 2), Tonicity::minus);
  EXPECT_EQ(expected_tonicity(make_polynomial({1, 2, 3}), 3), Tonicity::both);
  EXPECT_EQ(expected_tonicity(make_polynomial({1, 2, 3}), 1), Tonicity::neither);
  EXPECT_EQ(expected_tonicity(make_moebius(0.5), 2), Tonicity::plus);
  EXPECT_EQ(expected_tonicity(make_moebius(-0.5), 2), Tonicity::minus);
  EXPECT_EQ(expected_tonicity(make_moebius(-0.5), 3), Tonicity::plus);
}

TEST(CatalogTables, ShiftedProductFollowsBase) {
  // (-1)^{k-m-1} prod (x - a_l) g is k-tone for operator monotone g
  CatalogEntry log = make_log();
  EXPECT_EQ(expected_tonicity(make_shifted_product({0.3}, log), 2), Tonicity::plus);
  EXPECT_EQ(expected_tonicity(make_shifted_product({0.3, 1.0}, log), 3), Tonicity::plus);
  EXPECT_EQ(expected_tonicity(make_shifted_product({0.3}, negate_entry(make_power(-1))), 2), Tonicity::plus);
  EXPECT_THROW(expected_tonicity(make_shifted_product({0.3}, log), 1), CapabilityError);
  EXPECT_THROW(expected_tonicity(make_shifted_product({-0.3}, log), 2), CapabilityError);
}

TEST(CatalogTables, ExpHasNoTable) {
  EXPECT_THROW(expected_tonicity(make_exp(), 1), CapabilityError);
  EXPECT_TRUE(expected_table(make_exp()).empty());
  EXPECT_EQ(expected_table(make_log()).size(), 6u);
  EXPECT_THROW(expected_tonicity(make_log(), 0), ContractViolation);
}

TEST(CatalogDerivs, ClosedFormExamples) {
  auto sq = make_power(2).function;
  for (double x : {-3.0, 0.1, 7.0}) EXPECT_DOUBLE_EQ(sq.deriv(2, x), 2.0);
  EXPECT_DOUBLE_EQ(make_logmean().function.eval(1.0), 1.0);
  auto xl = make_power_log(1).function;
  for (double x : {0.2, 1.0, 4.0}) EXPECT_NEAR(xl.deriv(2, x), 1.0 / x, 1e-14);
  EXPECT_NEAR(make_power(0.5).function.deriv(1, 4.0), 0.25, 1e-15);
  EXPECT_NEAR(make_moebius(0.5).function.eval(0.5), 0.5 / 0.75, 1e-15);
}

TEST(CatalogDerivs, PowerLogDerivativeFormula) {
  // x^{p-k} { p(p-1)...(p-k+1) log x + Q_k(p) }, Q_k(p) = sum_i prod_{j != i} (p - j)
  Gen g(51);
  for (int t = 0; t < 100; ++t) {
    double p = g.uniform(-2.0, 4.0), x = g.uniform(0.1, 5.0);
    int k = g.integer(1, 8);
    double ff = 1.0, q = 0.0;
    for (int i = 0; i < k; ++i) {
      ff *= p - i;
      double prod = 1.0;
      for (int j = 0; j < k; ++j) {
        if (j != i) prod *= p - j;
      }
      q += prod;
    }
    double want = std::pow(x, p - k) * (ff * std::log(x) + q);
    EXPECT_NEAR(make_power_log(p).function.deriv(k, x), want, 1e-10 * (1.0 + std::abs(want)));
  }
}

TEST(CatalogDerivs, PowerOverXPlusOneEndCoefficients) {
  // x^{k-p} (x+1)^{k+1} f^(k)(x) is a polynomial with constant term p(p-1)...(p-k+1)
  for (double p : {0.5, 1.5, 2.0, -0.5}) {
    auto f = make_power_over_x_plus_1(p).function;
    for (int k = 1; k <= 5; ++k) {
      double x = 1e-7;
      double q0 = std::pow(x, k - p) * std::pow(x + 1, k + 1) * f.deriv(k, x);
      EXPECT_NEAR(q0, falling_factorial(p, k), 1e-4 * (1 + std::abs(falling_factorial(p, k)))) << p << " " << k;
      double big = 1e7;
      double lead = std::pow(big, k - p) * std::pow(big + 1, k + 1) * f.deriv(k, big) / std::pow(big, k);
      EXPECT_NEAR(lead, falling_factorial(p - 1, k), 1e-4 * (1 + std::abs(falling_factorial(p - 1, k))));
    }
  }
}

TEST(CatalogDerivs, FiniteDifferenceConsistencyProperty) {
  Gen g(52);
  for (const auto& name : default_catalog_names()) {
    CatalogEntry e = parse_function(name);
    const Interval& dom = e.function.domain();
    double lo = std::isfinite(dom.lo) ? dom.lo + 0.1 : -3.0;
    double hi = std::isfinite(dom.hi) ? dom.hi - 0.1 : 5.0;
    for (int t = 0; t < 100; ++t) {
      double x = g.uniform(lo, hi);
      int m = 1 + t % 6;
      double h = 1e-3 * std::min(1.0, dom.boundary_distance(x));
      double want = fd_next(e.function, m, x, h);
      double got = e.function.deriv(m, x);
      EXPECT_NEAR(got, want, 1e-4 * (1.0 + std::abs(got))) << name << " m=" << m << " x=" << x;
    }
  }
}

TEST(CatalogDerivs, LogmeanSmoothAcrossOne) {
  auto f = make_logmean().function;
  for (int m = 0; m <= 8; ++m) {
    double lim = f.deriv(m, 1.0);
    for (double d : {1e-2, 1e-4, 1e-6, 1e-9}) {
      EXPECT_NEAR(f.deriv(m, 1.0 + d), lim, 50 * d * (1 + std::abs(lim)) + 1e-12) << m << " " << d;
      EXPECT_NEAR(f.deriv(m, 1.0 - d), lim, 50 * d * (1 + std::abs(lim)) + 1e-12) << m << " " << d;
    }
  }
  // (x-1)/log x at x = e is (e - 1)
  EXPECT_NEAR(f.eval(std::exp(1.0)), std::exp(1.0) - 1.0, 1e-14);
  EXPECT_NEAR(f.deriv(1, 1.0), 0.5, 1e-14);
}

TEST(CatalogDerivs, CapabilityBeyondMaxOrder) {
  auto f = make_log().function;
  EXPECT_EQ(f.max_deriv_order(), kCatalogMaxOrder);
  EXPECT_THROW(f.deriv(kCatalogMaxOrder + 1, 1.0), CapabilityError);
  EXPECT_THROW(f.eval(-1.0), DomainError);
}

TEST(CatalogNames, ParseRoundTrip) {
  for (const auto& name : default_catalog_names()) {
    EXPECT_EQ(parse_function(name).name(), name);
  }
  CatalogEntry neg = parse_function("-power:2.5");
  EXPECT_TRUE(neg.negated);
  EXPECT_DOUBLE_EQ(neg.function.eval(4.0), -32.0);
  EXPECT_EQ(parse_function("sqrt").family, Family::power);
  EXPECT_EQ(parse_function("poly:1,0,2").function.eval(2.0), 9.0);
  EXPECT_NEAR(parse_function("shift:0.3:log").function.eval(2.0), 1.7 * std::log(2.0), 1e-15);
}

TEST(CatalogNames, Errors) {
  EXPECT_THROW(parse_function("nosuch"), UnknownFunction);
  EXPECT_THROW(parse_function(""), UnknownFunction);
  EXPECT_THROW(parse_function("power"), ParseError);
  EXPECT_THROW(parse_function("power:abc"), ParseError);
  EXPECT_THROW(parse_function("log:2"), ParseError);
}

TEST(CatalogFlags, OperatorConcave) {
  EXPECT_TRUE(make_log().function.operator_concave());
  EXPECT_TRUE(make_power(0.5).function.operator_concave());
  EXPECT_FALSE(make_power(1.5).function.operator_concave());
  EXPECT_EQ(to_string(swap_sign(Tonicity::plus)), "minus");
  EXPECT_EQ(parse_tonicity("both"), Tonicity::both);
}
