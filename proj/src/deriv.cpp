#include "ktone/deriv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ktone/divdiff.hpp"
#include "ktone/errors.hpp"

namespace ktone {

namespace {

double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

/// Lazily filled table of f[lam_{i0}, ..., lam_{ik}] keyed by the sorted index tuple.
class DivDiffTable {
 public:
  DivDiffTable(const ScalarFunction& f, const Eigen::VectorXd& lam, int k)
      : f_(f), lam_(lam), n_(static_cast<int>(lam.size())), k_(k) {
    std::size_t size = 1;
    for (int i = 0; i <= k; ++i) size *= static_cast<std::size_t>(n_);
    values_.assign(size, std::numeric_limits<double>::quiet_NaN());
    pts_.resize(k + 1);
  }

  double get(std::vector<int>& idx) {
    std::sort(idx.begin(), idx.end());
    std::size_t key = 0;
    for (int v : idx) key = key * n_ + v;
    double& slot = values_[key];
    if (std::isnan(slot)) {
      for (int q = 0; q <= k_; ++q) pts_[q] = lam_[idx[q]];
      slot = scalar_divdiff(f_, pts_);
    }
    return slot;
  }

 private:
  const ScalarFunction& f_;
  const Eigen::VectorXd& lam_;
  int n_;
  int k_;
  std::vector<double> values_;
  std::vector<double> pts_;
};

}  // namespace

DkResult directional_derivative_dk_full(const ScalarFunction& f, const SymMatrix& a, const SymMatrix& x, int k) {
  if (k < 1) throw ContractViolation("derivative order must be at least 1");
  if (a.dim() != x.dim()) throw ContractViolation("A and X must have equal dimension");
  SpectralDecomposition sd = eigh(a);
  const Eigen::VectorXd& lam = sd.eigenvalues;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (!f.domain().contains(lam[i])) {
      throw DomainError("eigenvalue " + std::to_string(lam[i]) + " outside domain " + f.domain().to_string() +
                        " of " + f.name());
    }
  }
  const int n = a.dim();
  const Eigen::MatrixXd& q = sd.eigenvectors;
  Eigen::MatrixXd xt = q.transpose() * x.mat() * q;
  xt = 0.5 * (xt + xt.transpose()).eval();

  DivDiffTable table(f, lam, k);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd mag = Eigen::MatrixXd::Zero(n, n);
  std::vector<int> r(std::max(k - 1, 0), 0);
  std::vector<int> idx(k + 1);

  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double sum = 0.0;
      double abs_sum = 0.0;
      std::fill(r.begin(), r.end(), 0);
      while (true) {
        double prod = 1.0;
        int prev = i;
        for (int s = 0; s < k - 1; ++s) {
          prod *= xt(prev, r[s]);
          prev = r[s];
        }
        prod *= xt(prev, j);
        if (prod != 0.0) {
          idx[0] = i;
          for (int s = 0; s < k - 1; ++s) idx[s + 1] = r[s];
          idx[k] = j;
          double term = table.get(idx) * prod;
          sum += term;
          abs_sum += std::abs(term);
        }
        int pos = k - 2;
        while (pos >= 0 && ++r[pos] == n) {
          r[pos] = 0;
          --pos;
        }
        if (pos < 0) break;
      }
      acc(i, j) = sum;
      acc(j, i) = sum;
      mag(i, j) = abs_sum;
      mag(j, i) = abs_sum;
    }
  }
  double kf = factorial(k);
  Eigen::MatrixXd res = kf * (q * acc * q.transpose());
  DkResult out;
  out.value = SymMatrix::from_upper(0.5 * (res + res.transpose()));
  out.magnitude = kf * mag.norm();
  return out;
}

SymMatrix directional_derivative_dk(const ScalarFunction& f, const SymMatrix& a, const SymMatrix& x, int k) {
  return directional_derivative_dk_full(f, a, x, k).value;
}

int fd_half_width(int k) { return std::max(kFdHalfWidth, k); }

double default_fd_step(const ScalarFunction& f, const SymMatrix& a, const SymMatrix& x, int k) {
  double length = 1.0 + a.spectral_norm();
  const Interval& dom = f.domain();
  length = std::min({length, dom.boundary_distance(min_eig(a)), dom.boundary_distance(max_eig(a))});
  double xn = x.spectral_norm();
  if (!(xn > 0.0)) xn = 1.0;
  return kFdReach * length / (xn * fd_half_width(k));
}

std::vector<double> fornberg_weights(const std::vector<double>& nodes, int k) {
  const int n = static_cast<int>(nodes.size());
  if (k < 0 || n <= k) throw ContractViolation("stencil needs more than k nodes");
  std::vector<std::vector<double>> c(n, std::vector<double>(k + 1, 0.0));
  c[0][0] = 1.0;
  double c1 = 1.0;
  double c4 = nodes[0];
  for (int i = 1; i < n; ++i) {
    const int top = std::min(i, k);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i];
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int s = top; s >= 1; --s) c[i][s] = c1 * (s * c[i - 1][s - 1] - c5 * c[i - 1][s]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int s = top; s >= 1; --s) c[j][s] = (c4 * c[j][s] - s * c[j][s - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][k];
  return w;
}

FdResult directional_derivative_fd_full(const ScalarFunction& f, const SymMatrix& a, const SymMatrix& x, int k,
                                        double h) {
  if (k < 1) throw ContractViolation("derivative order must be at least 1");
  if (a.dim() != x.dim()) throw ContractViolation("A and X must have equal dimension");
  if (!(h > 0.0)) h = default_fd_step(f, a, x, k);
  const int m = fd_half_width(k);
  std::vector<double> nodes;
  for (int j = -m; j <= m; ++j) nodes.push_back(j * h);
  std::vector<double> w = fornberg_weights(nodes, k);
  const int n = a.dim();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j <= 2 * m; ++j) {
    if (w[j] != 0.0) acc += w[j] * apply_function(f, a + x * nodes[j]).mat();
  }
  FdResult out;
  out.value = SymMatrix::from_upper(0.5 * (acc + acc.transpose()));
  out.h = h;
  out.stencil = "central-" + std::to_string(2 * m + 1) + "pt";
  return out;
}

SymMatrix directional_derivative_fd(const ScalarFunction& f, const SymMatrix& a, const SymMatrix& x, int k,
                                    double h) {
  return directional_derivative_fd_full(f, a, x, k, h).value;
}

SymMatrix taylor_remainder_gap(const ScalarFunction& f, const SymMatrix& a, const SymMatrix& x, int k) {
  if (k < 1) throw ContractViolation("remainder order must be at least 1");
  Eigen::MatrixXd gap = apply_function(f, a + x).mat() - apply_function(f, a).mat();
  double fact = 1.0;
  for (int l = 1; l < k; ++l) {
    fact *= l;
    gap -= directional_derivative_dk(f, a, x, l).mat() / fact;
  }
  return SymMatrix::from_upper(0.5 * (gap + gap.transpose()));
}

}  // namespace ktone
