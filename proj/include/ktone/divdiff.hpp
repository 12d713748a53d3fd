#pragma once

#include <vector>

#include "ktone/matfun.hpp"
#include "ktone/scalar_function.hpp"

namespace ktone {

/// Relative clustering radius: points closer than this times the local scale
/// are handled by a Taylor expansion about the cluster mean.
inline constexpr double kClusterRadius = 1e-2;
/// Confluence threshold, relative to the function's domain width.
inline constexpr double kConfluentRelative = 1e-7;
/// Minimum separation of partition points in [0, 1].
inline constexpr double kPartitionSeparation = 1e-7;
/// Ratio below which a matrix divided difference is flagged as cancellation-dominated.
inline constexpr double kCancellationRatio = 1e-6;

/// f[x_0, ..., x_k] with confluent points handled through the derivative oracle.
double scalar_divdiff(const ScalarFunction& f, const std::vector<double>& xs);

/// Plain two-term recursion on distinct points, no clustering.
double scalar_divdiff_recursive(const ScalarFunction& f, const std::vector<double>& xs);

/// Complete homogeneous symmetric polynomial of the given degree.
double complete_homogeneous(int degree, const std::vector<double>& ys);

struct MatrixDivDiff {
  SymMatrix value;
  double max_summand_norm = 0.0;
  bool cancellation_dominated = false;
};

/// Operator-valued divided difference of t -> f((1-t)A + tB) at the partition ts.
MatrixDivDiff matrix_divdiff_full(const ScalarFunction& f, const SymMatrix& a, const SymMatrix& b,
                                  const std::vector<double>& ts, double separation = kPartitionSeparation);

SymMatrix matrix_divdiff(const ScalarFunction& f, const SymMatrix& a, const SymMatrix& b,
                         const std::vector<double>& ts, double separation = kPartitionSeparation);

/// Sum of all words with l letters x and r letters y.
Eigen::MatrixXd word_sum(int l, int r, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

/// Closed-form k-th divided difference of x^m along the segment from A to B.
SymMatrix monomial_divdiff_oracle(int m, const SymMatrix& a, const SymMatrix& b, const std::vector<double>& ts,
                                  int k);

/// Equi-partition t_i = i/k.
std::vector<double> equi_partition(int k);

}  // namespace ktone
