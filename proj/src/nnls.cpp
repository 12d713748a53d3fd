#include "ktone/nnls.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "ktone/errors.hpp"

namespace ktone {

namespace {

Eigen::VectorXd solve_active(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const std::vector<int>& active) {
  Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(active.size()));
  for (std::size_t j = 0; j < active.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = a.col(active[j]);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
  return qr.solve(b);
}

}  // namespace

NnlsResult nnls(const Eigen::MatrixXd& a_in, const Eigen::VectorXd& b_in, double tikhonov, int max_iter) {
  const Eigen::Index m = a_in.rows();
  const Eigen::Index n = a_in.cols();
  if (b_in.size() != m) throw ContractViolation("nnls: right-hand side length mismatch");
  if (tikhonov < 0) throw ContractViolation("nnls: regularization must be nonnegative");
  if (max_iter <= 0) max_iter = static_cast<int>(3 * n + 30);

  // unit column scaling; the regularizer acts on the unscaled unknowns
  Eigen::VectorXd scale(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double c = a_in.col(j).norm();
    scale[j] = c > 0 ? 1.0 / c : 0.0;
  }
  Eigen::Index rows = tikhonov > 0 ? m + n : m;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, n);
  a.topRows(m) = a_in * scale.asDiagonal();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
  b.head(m) = b_in;
  if (tikhonov > 0) {
    double r = std::sqrt(tikhonov);
    for (Eigen::Index j = 0; j < n; ++j) a(m + j, j) = r * scale[j];
  }

  const double bnorm = b.norm();
  const double tol = 1e-12 * (1.0 + bnorm);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  std::vector<char> in_set(n, 0);
  std::vector<char> blocked(n, 0);
  NnlsResult out;

  for (int iter = 0; iter < max_iter; ++iter) {
    out.iterations = iter + 1;
    Eigen::VectorXd w = a.transpose() * (b - a * y);
    Eigen::Index pick = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!in_set[j] && !blocked[j] && scale[j] > 0 && w[j] > best) {
        best = w[j];
        pick = j;
      }
    }
    if (pick < 0) {
      out.converged = true;
      break;
    }
    in_set[pick] = 1;
    while (true) {
      std::vector<int> active;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (in_set[j]) active.push_back(static_cast<int>(j));
      }
      Eigen::VectorXd z = solve_active(a, b, active);
      bool feasible = true;
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (!(z[i] > 0)) feasible = false;
      }
      if (feasible) {
        for (std::size_t i = 0; i < active.size(); ++i) y[active[i]] = z[static_cast<Eigen::Index>(i)];
        std::fill(blocked.begin(), blocked.end(), 0);
        break;
      }
      double step = 1.0;
      for (std::size_t i = 0; i < active.size(); ++i) {
        double zi = z[static_cast<Eigen::Index>(i)];
        if (!(zi > 0)) {
          double yi = y[active[i]];
          double s = yi / (yi - zi);
          if (s < step) step = s;
        }
      }
      bool removed = false;
      for (std::size_t i = 0; i < active.size(); ++i) {
        int j = active[i];
        y[j] += step * (z[static_cast<Eigen::Index>(i)] - y[j]);
        if (y[j] <= 0.0) {
          y[j] = 0.0;
          in_set[j] = 0;
          removed = true;
        }
      }
      if (!removed || !in_set[pick]) {
        // the entering column cannot be kept positive; exclude it until the set changes
        if (!in_set[pick]) {
          blocked[pick] = 1;
          break;
        }
      }
      bool any = false;
      for (char c : in_set) any = any || c;
      if (!any) break;
    }
  }
  Eigen::VectorXd grad = a.transpose() * (b - a * y);
  double kkt = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (y[j] == 0.0 && scale[j] > 0) kkt = std::max(kkt, grad[j]);
  }
  out.kkt = kkt;
  out.x = scale.asDiagonal() * y;
  out.residual_norm = (a_in * out.x - b_in).norm();
  return out;
}

}  // namespace ktone
