#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "ktone/nnls.hpp"
#include "support/gen.hpp"

using ktone::nnls;
using ktone::NnlsResult;
using ktone::testing::Gen;

namespace {

// Exhaustive search over supports: least squares on each subset, keep the best feasible one.
Eigen::VectorXd brute_force(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(a.cols());
  Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
  double best_res = b.squaredNorm();
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> cols;
    for (int j = 0; j < n; ++j) {
      if (mask & (1 << j)) cols.push_back(j);
    }
    Eigen::MatrixXd sub(a.rows(), cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) sub.col(c) = a.col(cols[c]);
    Eigen::VectorXd z = sub.colPivHouseholderQr().solve(b);
    if (z.minCoeff() < 0) continue;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (std::size_t c = 0; c < cols.size(); ++c) x[cols[c]] = z[c];
    double res = (a * x - b).squaredNorm();
    if (res < best_res) {
      best_res = res;
      best = x;
    }
  }
  return best;
}

}  // namespace

TEST(Nnls, UnconstrainedOptimumInsideOrthant) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd b(3);
  b << 1, 2, 3;
  NnlsResult r = nnls(a, b);
  EXPECT_TRUE(r.converged);
  EXPECT_LE((r.x - b).norm(), 1e-14);
  EXPECT_LE(r.residual_norm, 1e-14);
}

TEST(Nnls, ClampsNegativeDirections) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd b(2);
  b << -1, 2;
  NnlsResult r = nnls(a, b);
  EXPECT_DOUBLE_EQ(r.x[0], 0.0);
  EXPECT_NEAR(r.x[1], 2.0, 1e-14);
  EXPECT_NEAR(r.residual_norm, 1.0, 1e-14);
}

TEST(Nnls, ZeroRightHandSide) {
  Gen g(71);
  Eigen::MatrixXd a(5, 3);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = g.normal();
  NnlsResult r = nnls(a, Eigen::VectorXd::Zero(5));
  EXPECT_EQ(r.x.norm(), 0.0);
  EXPECT_TRUE(r.converged);
}

TEST(Nnls, MatchesExhaustiveSupportSearchProperty) {
  Gen g(72);
  for (int t = 0; t < 200; ++t) {
    int m = g.integer(3, 9);
    int n = g.integer(1, 6);
    Eigen::MatrixXd a(m, n);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
      b[i] = g.normal();
      for (int j = 0; j < n; ++j) a(i, j) = g.normal();
    }
    NnlsResult r = nnls(a, b);
    Eigen::VectorXd want = brute_force(a, b);
    EXPECT_TRUE(r.converged);
    EXPECT_GE(r.x.minCoeff(), 0.0);
    EXPECT_NEAR((a * r.x - b).norm(), (a * want - b).norm(), 1e-10) << "m=" << m << " n=" << n;
  }
}

TEST(Nnls, KktConditionsProperty) {
  Gen g(73);
  for (int t = 0; t < 100; ++t) {
    int m = g.integer(5, 30), n = g.integer(2, 15);
    Eigen::MatrixXd a(m, n);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
      b[i] = g.normal();
      for (int j = 0; j < n; ++j) a(i, j) = g.uniform(0.0, 1.0);
    }
    NnlsResult r = nnls(a, b);
    Eigen::VectorXd grad = a.transpose() * (b - a * r.x);
    double scale = a.norm() * (1.0 + b.norm());
    for (int j = 0; j < n; ++j) {
      if (r.x[j] > 0) {
        EXPECT_NEAR(grad[j], 0.0, 1e-9 * scale);
      } else {
        EXPECT_LE(grad[j], 1e-9 * scale);
      }
    }
    EXPECT_LE(r.kkt, 1e-9);
  }
}

TEST(Nnls, TikhonovShrinksSolution) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd b(2);
  b << 1, 1;
  NnlsResult r = nnls(a, b, 1.0);
  // min (x-1)^2 + x^2 -> x = 1/2
  EXPECT_NEAR(r.x[0], 0.5, 1e-14);
  EXPECT_NEAR(r.x[1], 0.5, 1e-14);
}

TEST(Nnls, IllConditionedCauchyDesign) {
  // kernel 1/(x_i + lambda_j) with a planted nonnegative solution
  Gen g(74);
  const int m = 60, n = 25;
  Eigen::MatrixXd a(m, n);
  for (int i = 0; i < m; ++i) {
    double x = std::exp(g.uniform(std::log(0.01), std::log(100.0)));
    for (int j = 0; j < n; ++j) a(i, j) = 1.0 / (x + std::pow(10.0, -3.0 + 6.0 * j / (n - 1)));
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  w[4] = 1.0;
  w[17] = 2.5;
  Eigen::VectorXd b = a * w;
  NnlsResult r = nnls(a, b, 1e-12);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.residual_norm, 1e-6 * b.norm());
}
