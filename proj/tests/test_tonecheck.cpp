#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "ktone/catalog.hpp"
#include "ktone/divdiff.hpp"
#include "ktone/errors.hpp"
#include "ktone/tonecheck.hpp"
#include "support/gen.hpp"

using namespace ktone;
using ktone::testing::Gen;

namespace {

CheckOptions quick(int k, int trials = 30, std::vector<int> dims = {1, 2, 3}) {
  CheckOptions o;
  o.k = k;
  o.trials = trials;
  o.dims = std::move(dims);
  o.seed = 7;
  return o;
}

ScalarFunction fn(const char* name) { return parse_function(name).function; }

const Interval kUnit = Interval::symmetric_unit();
const Interval kHalf = Interval::positive();

}  // namespace

TEST(CheckDefinition, SquareNotMonotoneOnUnitInterval) {
  ToneReport r = check_definition(fn("power:2"), kUnit, quick(1));
  ASSERT_EQ(r.verdict, Verdict::refuted);
  ASSERT_TRUE(r.counterexample.has_value());
  const Counterexample& ce = *r.counterexample;
  EXPECT_EQ(ce.criterion, "definition");
  EXPECT_LT(ce.min_eig, -ce.threshold);
  EXPECT_LT(r.worst_margin, 0.0);
  // dim-1 instance from the text: A = -0.5, B = 0
  SymMatrix a = SymMatrix::diagonal(Eigen::VectorXd::Constant(1, -0.5));
  SymMatrix b = SymMatrix::zero(1);
  EXPECT_DOUBLE_EQ(matrix_divdiff(fn("power:2"), a, b, {0.0, 1.0})(0, 0), -0.25);
}

TEST(CheckDefinition, CounterexampleReplaysBitExactly) {
  for (const char* name : {"power:2", "power:1.5", "power:3"}) {
    auto f = fn(name);
    ToneReport r = check_definition(f, kHalf, quick(1));
    ASSERT_EQ(r.verdict, Verdict::refuted) << name;
    Counterexample again = reevaluate(f, *r.counterexample, r.tol);
    EXPECT_EQ(again.min_eig, r.counterexample->min_eig) << name;
    EXPECT_TRUE(again.violating == r.counterexample->violating) << name;
  }
}

TEST(CheckDefinition, MonomialIsItsOwnOrderTone) {
  for (int m = 1; m <= 4; ++m) {
    std::vector<double> c(m + 1, 0.0);
    c[m] = 1.0;
    ToneReport r = check_definition(make_polynomial(c).function, parse_interval("-2,2"), quick(m, 15));
    EXPECT_EQ(r.verdict, Verdict::pass) << m;
    EXPECT_GT(r.certificates, 0);
  }
}

TEST(CheckDefinition, SqrtSecondOrderSign) {
  EXPECT_EQ(check_definition(fn("power:0.5"), kHalf, quick(2)).verdict, Verdict::refuted);
  EXPECT_EQ(check_definition(fn("-power:0.5"), kHalf, quick(2)).verdict, Verdict::pass);
}

TEST(CheckDefinition, RefutationEmbedsInLargerDimensionProperty) {
  // direct sum with a scalar keeps the violating eigenvalue
  Gen g(61);
  for (const char* name : {"power:2", "power:1.5", "power:0.5"}) {
    auto f = fn(name);
    int k = std::string(name) == "power:0.5" ? 2 : 1;
    ToneReport r = check_definition(f, kHalf, quick(k));
    ASSERT_EQ(r.verdict, Verdict::refuted) << name;
    const Counterexample& ce = *r.counterexample;
    for (int t = 0; t < 5; ++t) {
      double c = g.uniform(0.5, 3.0);
      SymMatrix big = matrix_divdiff(f, ce.a.direct_sum(c), ce.b.direct_sum(c), ce.partition);
      EXPECT_LE(min_eig(big), ce.min_eig + 1e-12 * (1 + std::abs(ce.min_eig))) << name;
    }
  }
}

TEST(CheckDefinition, DeterministicAcrossThreadCounts) {
  CheckOptions one = quick(2, 40);
  CheckOptions many = one;
  many.threads = 4;
  for (const char* name : {"power:2.5", "log", "power:-1"}) {
    ToneReport a = check_definition(fn(name), kHalf, one);
    ToneReport b = check_definition(fn(name), kHalf, many);
    EXPECT_EQ(a.verdict, b.verdict) << name;
    EXPECT_EQ(a.worst_margin, b.worst_margin) << name;
    EXPECT_EQ(a.certificates, b.certificates) << name;
    if (a.counterexample) EXPECT_EQ(a.counterexample->sub_seed, b.counterexample->sub_seed);
  }
}

TEST(CheckDefinition, EquiPartitionOnlyAgreesWithFullSampling) {
  for (const char* name : {"log", "power:0.5", "power:1.5", "power:2.5", "powerlog:1", "logmean"}) {
    for (int k = 1; k <= 3; ++k) {
      CheckOptions full = quick(k, 20);
      CheckOptions equi = full;
      equi.partitions_per_trial = 1;
      Verdict a = check_definition(fn(name), kHalf, full).verdict;
      Verdict b = check_definition(fn(name), kHalf, equi).verdict;
      EXPECT_EQ(a == Verdict::refuted, b == Verdict::refuted) << name << " k=" << k;
    }
  }
}

TEST(CheckDefinition, ShiftedProductClosure) {
  // (-1)^{k-m-1} prod (x - a_l) g for operator monotone g
  for (int k = 2; k <= 4; ++k) {
    for (int m = 1; m <= std::min(2, k - 1); ++m) {
      std::vector<double> alphas(m);
      for (int i = 0; i < m; ++i) alphas[i] = 0.3 + 0.5 * i;
      CatalogEntry e = make_shifted_product(alphas, make_log());
      if ((k - m - 1) % 2) e = negate_entry(e);
      EXPECT_EQ(check_definition(e.function, kHalf, quick(k, 15)).verdict, Verdict::pass) << "k=" << k << " m=" << m;
    }
  }
}

TEST(CheckDefinition, ContractErrors) {
  CheckOptions bad = quick(0);
  EXPECT_THROW(check_definition(fn("log"), kHalf, bad), ContractViolation);
  CheckOptions nodims = quick(1);
  nodims.dims.clear();
  EXPECT_THROW(check_definition(fn("log"), kHalf, nodims), ContractViolation);
}

TEST(CheckDerivative, Examples) {
  EXPECT_EQ(check_derivative(fn("log"), kHalf, quick(1)).verdict, Verdict::pass);
  Interval w = parse_interval("-2,2");
  EXPECT_EQ(check_derivative(fn("power:3"), w, quick(3)).verdict, Verdict::pass);
  ToneReport r = check_derivative(fn("power:3"), w, quick(2));
  ASSERT_EQ(r.verdict, Verdict::refuted);
  EXPECT_EQ(r.counterexample->criterion, "derivative");
}

TEST(CheckDerivative, SymmetricDirectionsForEvenOrder) {
  CheckOptions o = quick(2);
  o.symmetric_directions = true;
  EXPECT_EQ(check_derivative(fn("-power:0.5"), kHalf, o).verdict, Verdict::pass);
  EXPECT_EQ(check_derivative(fn("power:0.5"), kHalf, o).verdict, Verdict::refuted);
}

TEST(CheckDerivative, AgreesWithDefinitionOnTables) {
  for (const char* name : {"power:-1", "power:2.5", "powx1:1", "plogmean:1"}) {
    for (int k = 1; k <= 3; ++k) {
      Verdict d = check_definition(fn(name), kHalf, quick(k, 20)).verdict;
      Verdict v = check_derivative(fn(name), kHalf, quick(k, 20)).verdict;
      EXPECT_EQ(d == Verdict::refuted, v == Verdict::refuted) << name << " k=" << k;
    }
  }
}

TEST(RemainderFunction, CubeAtOne) {
  // (x^3 - 1 - 3(x - 1)) / (x - 1)^2 = x + 2
  ScalarFunction g = remainder_function(fn("power:3"), 3, 1.0);
  for (double x : {0.2, 0.9, 1.0, 1.1, 3.0}) EXPECT_NEAR(g.eval(x), x + 2.0, 1e-12) << x;
  EXPECT_NEAR(g.deriv(1, 2.0), 1.0, 1e-8);
  ScalarFunction sq = remainder_function(fn("power:2"), 2, 0.0);
  for (double x : {-0.5, 0.0, 0.7}) EXPECT_NEAR(sq.eval(x), x, 1e-14);
}

TEST(CheckRemainder, Examples) {
  CheckOptions o = quick(3, 20);
  o.alphas = {1.0};
  EXPECT_EQ(check_remainder_monotone(fn("power:3"), kHalf, o).verdict, Verdict::pass);
  CheckOptions o2 = quick(2, 20);
  o2.alphas = {0.0};
  EXPECT_EQ(check_remainder_monotone(fn("power:2"), kUnit, o2).verdict, Verdict::pass);
  CheckOptions o3 = quick(3, 20);
  o3.alphas = {0.0};
  ToneReport r = check_remainder_monotone(make_polynomial({0, 0, 0, 0, 1}).function, kUnit, o3);
  ASSERT_EQ(r.verdict, Verdict::refuted);
  EXPECT_EQ(r.counterexample->criterion, "remainder");
  EXPECT_EQ(check_definition(make_polynomial({0, 0, 0, 0, 1}).function, kUnit, quick(3)).verdict, Verdict::refuted);
}

TEST(CheckPencil, LoewnerMatrices) {
  PointCheck s = check_pencil(fn("power:0.5"), kHalf, 1, {1.0, 4.0});
  EXPECT_EQ(s.verdict, Verdict::pass);
  EXPECT_NEAR(s.matrix(0, 0), 0.5, 1e-14);
  EXPECT_NEAR(s.matrix(0, 1), 1.0 / 3, 1e-14);
  EXPECT_NEAR(s.matrix(1, 1), 0.25, 1e-14);
  PointCheck id = check_pencil(make_polynomial({0, 1}).function, kUnit, 1, {-0.3, 0.1, 0.6});
  EXPECT_EQ(id.verdict, Verdict::pass);
  EXPECT_NEAR((id.matrix.mat() - Eigen::MatrixXd::Ones(3, 3)).norm(), 0.0, 1e-14);
  PointCheck sq = check_pencil(fn("power:2"), kUnit, 1, {-0.5, 0.5});
  EXPECT_EQ(sq.verdict, Verdict::refuted);
  EXPECT_NEAR(sq.matrix(0, 0), -1.0, 1e-14);
  EXPECT_NEAR(sq.matrix(0, 1), 0.0, 1e-14);
  EXPECT_NEAR(sq.matrix(1, 1), 1.0, 1e-14);
}

TEST(CheckPencil, KToneFunctionsGivePsdPencilsProperty) {
  Gen g(62);
  for (int t = 0; t < 60; ++t) {
    int k = g.integer(1, 3);
    int n = g.integer(2, 5);
    const char* name = k == 2 ? "-power:0.5" : "log";
    std::vector<double> pts = g.points(n, 0.1, 6.0, 0.05);
    EXPECT_EQ(check_pencil(fn(name), kHalf, k, pts).verdict, Verdict::pass) << name << " k=" << k;
  }
}

TEST(CheckHankel, Examples) {
  PointCheck h = check_hankel(fn("log"), kHalf, 1, 2, 1.0);
  EXPECT_EQ(h.verdict, Verdict::pass);
  EXPECT_NEAR(h.matrix(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(h.matrix(0, 1), -0.5, 1e-14);
  EXPECT_NEAR(h.matrix(1, 1), 1.0 / 3, 1e-14);
  PointCheck c = check_hankel(make_polynomial({0, 0, 0, 1}).function, kUnit, 3, 3, 0.4);
  EXPECT_EQ(c.verdict, Verdict::pass);
  EXPECT_NEAR(c.matrix(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(c.matrix.mat().cwiseAbs().sum(), 1.0, 1e-14);
  PointCheck sq = check_hankel(fn("power:2"), kUnit, 1, 2, 0.0);
  EXPECT_EQ(sq.verdict, Verdict::refuted);
  EXPECT_NEAR(sq.matrix(0, 1), 1.0, 1e-14);
  EXPECT_NEAR(sq.matrix(0, 0), 0.0, 1e-14);
}

TEST(CheckHankel, CapabilityError) {
  ScalarFunction low("low", kHalf, 2, [](int, double x) { return x; });
  EXPECT_THROW(check_hankel(low, kHalf, 1, 3, 1.0), CapabilityError);
}

TEST(InterpolationSign, Examples) {
  std::vector<double> probes;
  for (int i = 1; i < 100; ++i) probes.push_back(-1.0 + i / 50.0);
  EXPECT_EQ(check_interpolation_sign(fn("power:2"), kUnit, 2, {-0.5, 0.5}, probes).verdict, Verdict::pass);
  EXPECT_EQ(check_interpolation_sign(fn("power:3"), kUnit, 2, {-0.5, 0.5}, probes).verdict, Verdict::refuted);
  Gen g(63);
  std::vector<double> many;
  for (int i = 0; i < 1000; ++i) many.push_back(g.uniform(-3.0, 3.0));
  for (int t = 0; t < 10; ++t) {
    InterpolationCheck r = check_interpolation_sign(fn("exp"), Interval::real_line(), 3, g.points(3, -2.0, 2.0, 0.1), many);
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_EQ(r.probes, 1000);
  }
}

TEST(DerivativeConvexity, SpotCheck) {
  EXPECT_EQ(check_derivative_convexity(fn("-power:0.5"), kHalf, 2).verdict, Verdict::pass);
  EXPECT_EQ(check_derivative_convexity(fn("power:3"), parse_interval("-1,1"), 2).verdict, Verdict::refuted);
}

TEST(ConeChain, SqrtChainOnHalfLine) {
  ConeChainReport r = check_cone_chain(fn("power:0.5"), kHalf, 1, quick(1, 10));
  EXPECT_TRUE(r.consistent);
  EXPECT_FALSE(r.items.empty());
  for (const auto& item : r.items) EXPECT_NE(item.report.verdict, Verdict::refuted) << item.rule << " " << item.k;
}

TEST(ConeChain, IdentityOnUnitInterval) {
  ConeChainReport r = check_cone_chain(make_polynomial({0, 1}).function, kUnit, 1, quick(1, 10));
  EXPECT_TRUE(r.consistent);
  bool saw_three = false;
  for (const auto& item : r.items) saw_three = saw_three || item.k == 3;
  EXPECT_TRUE(saw_three);
}

TEST(ChainInequality, GapIdentities) {
  Gen g(64);
  auto f = fn("power:0.5");
  auto [a, b] = random_ordered_pair(kHalf, 3, g.seed());
  EXPECT_LE(chain_gap(f, a, b, 0.4, 0.4).max_abs(), 1e-13);
  EXPECT_LE(chain_gap(f, a, b, 0.0, 1.0).max_abs(), 1e-13);
  EXPECT_TRUE(is_psd(chain_gap(f, a, b, 0.25, 0.75), 1e-10));
}

TEST(ChainInequality, ConcaveFunctionsPass) {
  EXPECT_EQ(check_chain_inequality(fn("power:0.5"), kHalf, quick(1, 10), 5).verdict, Verdict::pass);
  EXPECT_EQ(check_chain_inequality(fn("log"), kHalf, quick(1, 10), 5).verdict, Verdict::pass);
}

TEST(ViolationThreshold, ScalesWithNorm) {
  EXPECT_GE(violation_threshold(1e-8, 10.0, 0.0), violation_threshold(1e-8, 1.0, 0.0));
  EXPECT_GE(violation_threshold(1e-8, 1.0, 1e6), violation_threshold(1e-8, 1.0, 0.0));
  EXPECT_DOUBLE_EQ(violation_threshold(1e-8, 0.0, 0.0), 1e-8);
  EXPECT_EQ(parse_verdict(to_string(Verdict::inconclusive)), Verdict::inconclusive);
}
