#pragma once

#include <cstdint>
#include <utility>

#include <Eigen/Dense>

#include "ktone/interval.hpp"
#include "ktone/scalar_function.hpp"

namespace ktone {

/// Real symmetric matrix. Construction checks symmetry and stores the exact symmetrization.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Eigen::MatrixXd& m);

  static SymMatrix zero(int n);
  static SymMatrix identity(int n);
  static SymMatrix diagonal(const Eigen::VectorXd& d);
  /// Skips the symmetry check; mirrors the upper triangle.
  static SymMatrix from_upper(const Eigen::MatrixXd& m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& mat() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  double max_abs() const;
  double frobenius() const { return m_.norm(); }
  double spectral_norm() const;

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix operator-() const;
  SymMatrix operator*(double c) const;
  /// Principal submatrix with row/column `skip` removed.
  SymMatrix drop_index(int skip) const;
  /// Block-diagonal direct sum with a 1x1 block.
  SymMatrix direct_sum(double scalar) const;
  /// Congruence U * this * U^T (result re-symmetrized).
  SymMatrix congruence(const Eigen::MatrixXd& u) const;
  bool operator==(const SymMatrix& o) const { return m_ == o.m_; }

 private:
  Eigen::MatrixXd m_;
};

SymMatrix operator*(double c, const SymMatrix& a);

struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // columns, orthogonal
};

SpectralDecomposition eigh(const SymMatrix& a);
SymMatrix reconstruct(const SpectralDecomposition& sd, const Eigen::VectorXd& values);

/// f(A) by functional calculus; throws DomainError naming the offending eigenvalue.
SymMatrix apply_function(const ScalarFunction& f, const SymMatrix& a);
SymMatrix apply_function(const ScalarFunction& f, const SpectralDecomposition& sd);

double min_eig(const SymMatrix& a);
double max_eig(const SymMatrix& a);
/// True iff min_eig(a) >= -tol * (1 + ||a||_2).
bool is_psd(const SymMatrix& a, double tol = 1e-8);

/// Seeded pair A <= B with both spectra inside interval.window(); B - A is exactly PSD.
std::pair<SymMatrix, SymMatrix> random_ordered_pair(const Interval& interval, int dim, std::uint64_t seed);
/// Seeded symmetric matrix with spectrum inside interval.window().
SymMatrix random_in_window(const Interval& interval, int dim, std::uint64_t seed);
/// Seeded symmetric matrix with entries of order `scale`.
SymMatrix random_symmetric(int dim, std::uint64_t seed, double scale = 1.0);
/// Seeded Haar-like orthogonal matrix.
Eigen::MatrixXd random_orthogonal(int dim, std::uint64_t seed);

/// Deterministic seed derivation used for sub-streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace ktone
