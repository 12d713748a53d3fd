#pragma once

// Hand-rolled seeded generators for property tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ktone/matfun.hpp"

namespace ktone::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  std::uint64_t seed() { return rng_(); }

  Eigen::MatrixXd orthogonal(int n) {
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR();
    for (int j = 0; j < n; ++j) {
      if (r(j, j) < 0) q.col(j) *= -1.0;
    }
    return q;
  }

  /// Symmetric matrix with spectrum drawn uniformly from [lo, hi].
  SymMatrix spectrum_in(int n, double lo, double hi) {
    Eigen::VectorXd lam(n);
    for (int i = 0; i < n; ++i) lam[i] = uniform(lo, hi);
    Eigen::MatrixXd q = orthogonal(n);
    Eigen::MatrixXd m = q * lam.asDiagonal() * q.transpose();
    return SymMatrix::from_upper(0.5 * (m + m.transpose()));
  }

  SymMatrix symmetric(int n, double scale = 1.0) {
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = scale * normal();
    return SymMatrix::from_upper(0.5 * (g + g.transpose()));
  }

  /// PSD matrix L L^T with spectral norm at most `scale`.
  SymMatrix psd(int n, double scale = 1.0) {
    Eigen::MatrixXd l(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) l(i, j) = normal();
    Eigen::MatrixXd m = l * l.transpose();
    double top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    m *= scale / std::max(top, 1e-300);
    return SymMatrix::from_upper(0.5 * (m + m.transpose()));
  }

  /// Sorted points in [lo, hi] with pairwise gaps at least `gap`.
  std::vector<double> points(int n, double lo, double hi, double gap) {
    while (true) {
      std::vector<double> xs(n);
      for (double& x : xs) x = uniform(lo, hi);
      std::sort(xs.begin(), xs.end());
      bool ok = true;
      for (int i = 1; i < n; ++i) ok = ok && xs[i] - xs[i - 1] >= gap;
      if (ok) return xs;
    }
  }

  /// Pinned partition 0 = t_0 < ... < t_k = 1 with interior points jittered around i/k.
  std::vector<double> partition(int k) {
    std::vector<double> ts(k + 1);
    for (int i = 0; i <= k; ++i) ts[i] = static_cast<double>(i) / k;
    for (int i = 1; i < k; ++i) ts[i] += uniform(-0.25, 0.25) / k;
    return ts;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    std::shuffle(v.begin(), v.end(), rng_);
  }

 private:
  std::mt19937_64 rng_;
};

inline double rel_err(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  return (got - want).norm() / (1.0 + want.norm());
}

inline double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

}  // namespace ktone::testing
