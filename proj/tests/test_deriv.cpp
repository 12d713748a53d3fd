#include <cmath>
#include <vector>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "ktone/catalog.hpp"
#include "ktone/deriv.hpp"
#include "ktone/divdiff.hpp"
#include "ktone/errors.hpp"
#include "support/gen.hpp"

using namespace ktone;
using ktone::testing::factorial;
using ktone::testing::Gen;
using ktone::testing::rel_err;

namespace {

// Block upper bidiagonal [[A, X], [0, A, X], ...] with k+1 diagonal blocks.
Eigen::MatrixXd bidiagonal(const SymMatrix& a, const SymMatrix& x, int k) {
  const int n = a.dim();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero((k + 1) * n, (k + 1) * n);
  for (int i = 0; i <= k; ++i) {
    m.block(i * n, i * n, n, n) = a.mat();
    if (i < k) m.block(i * n, (i + 1) * n, n, n) = x.mat();
  }
  return m;
}

// k! times the top-right block of F(bidiagonal) equals d^k/dt^k f(A + tX).
Eigen::MatrixXd corner(const Eigen::MatrixXd& fm, int n, int k) {
  return factorial(k) * fm.block(0, k * n, n, n);
}

}  // namespace

TEST(DirectionalDk, SquareSecondDerivative) {
  Gen g(31);
  SymMatrix a = g.symmetric(3), x = g.symmetric(3);
  auto f = make_polynomial({0, 0, 1}).function;
  Eigen::MatrixXd ax = a.mat() * x.mat();
  EXPECT_LE(rel_err(directional_derivative_dk(f, a, x, 1).mat(), ax + ax.transpose()), 1e-12);
  EXPECT_LE(rel_err(directional_derivative_dk(f, a, x, 2).mat(), 2.0 * x.mat() * x.mat()), 1e-12);
  EXPECT_LE(rel_err(directional_derivative_dk(f, a, x, 3).mat(), Eigen::MatrixXd::Zero(3, 3)), 1e-12);
}

TEST(DirectionalDk, CommutingIdentityDirection) {
  // X = I: d^k f(A + tI) = f^(k)(A)
  Gen g(32);
  auto f = make_power(0.5).function;
  for (int k = 1; k <= 5; ++k) {
    SymMatrix a = g.spectrum_in(4, 0.5, 3.0);
    Eigen::MatrixXd got = directional_derivative_dk(f, a, SymMatrix::identity(4), k).mat();
    ScalarFunction fk("d", f.domain(), 0, [&](int, double t) { return f.deriv(k, t); });
    EXPECT_LE(rel_err(got, apply_function(fk, a).mat()), 1e-11) << k;
  }
}

TEST(DirectionalDk, ExpMatchesBlockBidiagonalOracleProperty) {
  Gen g(33);
  auto f = make_exp().function;
  for (int t = 0; t < 40; ++t) {
    int n = g.integer(1, 4);
    int k = g.integer(1, 4);
    SymMatrix a = g.symmetric(n, 0.8), x = g.symmetric(n, 0.5);
    Eigen::MatrixXd want = corner(bidiagonal(a, x, k).exp(), n, k);
    EXPECT_LE(rel_err(directional_derivative_dk(f, a, x, k).mat(), want), 1e-9) << "n=" << n << " k=" << k;
  }
}

TEST(DirectionalDk, LogMatchesBlockBidiagonalOracleProperty) {
  Gen g(34);
  auto f = make_log().function;
  for (int t = 0; t < 30; ++t) {
    int n = g.integer(1, 3);
    int k = g.integer(1, 4);
    SymMatrix a = g.spectrum_in(n, 0.8, 3.0), x = g.symmetric(n, 0.3);
    Eigen::MatrixXd want = corner(bidiagonal(a, x, k).log(), n, k);
    EXPECT_LE(rel_err(directional_derivative_dk(f, a, x, k).mat(), want), 1e-7) << "n=" << n << " k=" << k;
  }
}

TEST(DirectionalDk, MagnitudeDominatesValueProperty) {
  Gen g(35);
  auto f = make_power(2.5).function;
  for (int t = 0; t < 40; ++t) {
    int n = g.integer(1, 5);
    int k = g.integer(1, 4);
    SymMatrix a = g.spectrum_in(n, 0.1, 4.0), x = g.symmetric(n);
    auto r = directional_derivative_dk_full(f, a, x, k);
    EXPECT_GE(r.magnitude * (1 + 1e-12), r.value.max_abs());
  }
}

TEST(DirectionalDk, HomogeneousInDirectionProperty) {
  Gen g(36);
  auto f = make_logmean().function;
  for (int t = 0; t < 30; ++t) {
    int n = g.integer(1, 4);
    int k = g.integer(1, 4);
    double c = g.uniform(-2.0, 2.0);
    SymMatrix a = g.spectrum_in(n, 0.3, 3.0), x = g.symmetric(n);
    Eigen::MatrixXd lhs = directional_derivative_dk(f, a, x * c, k).mat();
    Eigen::MatrixXd rhs = std::pow(c, k) * directional_derivative_dk(f, a, x, k).mat();
    EXPECT_LE(rel_err(lhs, rhs), 1e-9);
  }
}

TEST(DirectionalDk, ContractErrors) {
  auto f = make_log().function;
  SymMatrix a = SymMatrix::identity(2);
  EXPECT_THROW(directional_derivative_dk(f, a, SymMatrix::identity(3), 1), ContractViolation);
  EXPECT_THROW(directional_derivative_dk(f, a, a, 0), ContractViolation);
  EXPECT_THROW(directional_derivative_dk(f, -a, a, 1), DomainError);
}

TEST(FornbergWeights, ClassicalStencils) {
  auto w2 = fornberg_weights({-1.0, 0.0, 1.0}, 2);
  EXPECT_NEAR(w2[0], 1.0, 1e-14);
  EXPECT_NEAR(w2[1], -2.0, 1e-14);
  EXPECT_NEAR(w2[2], 1.0, 1e-14);
  auto w1 = fornberg_weights({-2.0, -1.0, 0.0, 1.0, 2.0}, 1);
  EXPECT_NEAR(w1[0], 1.0 / 12, 1e-14);
  EXPECT_NEAR(w1[1], -2.0 / 3, 1e-14);
  EXPECT_NEAR(w1[2], 0.0, 1e-14);
  EXPECT_NEAR(w1[3], 2.0 / 3, 1e-14);
}

TEST(FornbergWeights, ExactOnPolynomialsProperty) {
  Gen g(37);
  for (int t = 0; t < 50; ++t) {
    int m = g.integer(3, 9);
    std::vector<double> nodes = g.points(m, -1.0, 1.0, 0.05);
    int k = g.integer(0, m - 1);
    auto w = fornberg_weights(nodes, k);
    for (int p = 0; p < m; ++p) {
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += w[i] * std::pow(nodes[i], p);
      double want = p == k ? factorial(k) : 0.0;
      EXPECT_NEAR(s, want, 1e-6 * (1.0 + std::abs(want))) << "k=" << k << " p=" << p;
    }
  }
}

TEST(DirectionalFd, StencilShapeAndStep) {
  EXPECT_EQ(fd_half_width(1), kFdHalfWidth);
  EXPECT_GE(fd_half_width(12), 12);
  Gen g(38);
  auto f = make_log().function;
  SymMatrix a = g.spectrum_in(3, 0.5, 2.0), x = g.symmetric(3);
  auto r = directional_derivative_fd_full(f, a, x, 2);
  EXPECT_GT(r.h, 0.0);
  EXPECT_EQ(r.stencil, "central-17pt");
  // farthest node stays inside the domain
  double reach = fd_half_width(2) * r.h * x.spectral_norm();
  EXPECT_LT(reach, min_eig(a));
  EXPECT_DOUBLE_EQ(r.h, default_fd_step(f, a, x, 2));
}

TEST(DirectionalFd, AgreesWithDkProperty) {
  Gen g(39);
  std::vector<CatalogEntry> fs = {make_log(), make_power(0.5), make_power(-1), make_exp(), make_logmean()};
  for (const auto& e : fs) {
    for (int t = 0; t < 12; ++t) {
      int n = g.integer(1, 4);
      int k = g.integer(1, 4);
      SymMatrix a = g.spectrum_in(n, 0.4, 3.0), x = g.symmetric(n);
      Eigen::MatrixXd dk = directional_derivative_dk(e.function, a, x, k).mat();
      Eigen::MatrixXd fd = directional_derivative_fd(e.function, a, x, k).mat();
      EXPECT_LE(rel_err(fd, dk), 1e-4) << e.name() << " n=" << n << " k=" << k;
    }
  }
}

TEST(DirectionalFd, ExplicitStep) {
  auto f = make_polynomial({0, 0, 0, 1}).function;
  SymMatrix a = SymMatrix::diagonal(Eigen::Vector2d(1.0, 2.0));
  auto r = directional_derivative_fd_full(f, a, SymMatrix::identity(2), 3, 0.05);
  EXPECT_DOUBLE_EQ(r.h, 0.05);
  EXPECT_NEAR(r.value(0, 0), 6.0, 1e-7);
  EXPECT_NEAR(r.value(1, 1), 6.0, 1e-7);
}

TEST(TaylorRemainder, PolynomialBelowOrderVanishes) {
  Gen g(40);
  auto f = make_polynomial({1, -2, 0.5}).function;
  SymMatrix a = g.symmetric(3), x = g.symmetric(3);
  EXPECT_LE(taylor_remainder_gap(f, a, x, 3).max_abs(), 1e-12);
  Eigen::MatrixXd want = 0.5 * x.mat() * x.mat();
  EXPECT_LE(rel_err(taylor_remainder_gap(f, a, x, 2).mat(), want), 1e-12);
}

TEST(TaylorRemainder, OrderOneIsIncrement) {
  Gen g(41);
  auto f = make_log().function;
  auto [a, b] = random_ordered_pair(Interval::positive(), 3, g.seed());
  SymMatrix gap = taylor_remainder_gap(f, a, b - a, 1);
  EXPECT_LE(rel_err(gap.mat(), (apply_function(f, b) - apply_function(f, a)).mat()), 1e-13);
}

TEST(TaylorRemainder, IntegralFormScalarProperty) {
  // scalar case: remainder equals f[a, ..., a, a+x] x^k with a repeated k times
  Gen g(42);
  auto f = make_power(1.5).function;
  for (int t = 0; t < 40; ++t) {
    int k = g.integer(1, 5);
    double a = g.uniform(0.5, 2.0), x = g.uniform(-0.4, 1.0);
    std::vector<double> pts(k, a);
    pts.push_back(a + x);
    double want = scalar_divdiff(f, pts) * std::pow(x, k);
    SymMatrix am = SymMatrix::diagonal(Eigen::VectorXd::Constant(1, a));
    SymMatrix xm = SymMatrix::diagonal(Eigen::VectorXd::Constant(1, x));
    EXPECT_NEAR(taylor_remainder_gap(f, am, xm, k)(0, 0), want, 1e-10 * (1 + std::abs(want))) << k;
  }
}
