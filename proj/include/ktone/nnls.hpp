#pragma once

#include <Eigen/Dense>

namespace ktone {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual_norm = 0.0;
  /// max_j of the scaled gradient over inactive columns at exit.
  double kkt = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// min ||A x - b||^2 + tikhonov * ||x||^2 subject to x >= 0 (Lawson-Hanson active set).
NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tikhonov = 0.0, int max_iter = 0);

}  // namespace ktone
