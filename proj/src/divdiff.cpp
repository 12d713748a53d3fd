#include "ktone/divdiff.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "ktone/errors.hpp"

namespace ktone {

namespace {

constexpr int kRichOrder = 16;
constexpr int kTaylorExtra = 20;

struct Cluster {
  int begin = 0;
  int end = 0;  // exclusive
  bool taylor = false;
  double center = 0.0;
  std::vector<double> coeffs;  // f^(m)(center)/m!
};

double local_radius(const Interval& dom, double x) {
  return kClusterRadius * std::min(1.0 + std::abs(x), dom.boundary_distance(x));
}

std::vector<Cluster> split(const std::vector<double>& z, int begin, int end, double threshold_abs,
                           const Interval& dom, bool use_radius) {
  std::vector<Cluster> out;
  Cluster cur;
  cur.begin = begin;
  for (int i = begin + 1; i < end; ++i) {
    double gap = z[i] - z[i - 1];
    double link = use_radius ? local_radius(dom, 0.5 * (z[i] + z[i - 1])) : threshold_abs;
    if (gap > link) {
      cur.end = i;
      out.push_back(cur);
      cur = Cluster{};
      cur.begin = i;
    }
  }
  cur.end = end;
  out.push_back(cur);
  return out;
}

void prepare_taylor(const ScalarFunction& f, const std::vector<double>& z, Cluster& c, int order) {
  c.taylor = true;
  c.center = 0.5 * (z[c.begin] + z[c.end - 1]);
  c.coeffs.resize(order + 1);
  double fact = 1.0;
  for (int m = 0; m <= order; ++m) {
    if (m > 0) fact *= m;
    c.coeffs[m] = f.deriv(m, c.center) / fact;
  }
}

double taylor_block(const Cluster& c, const std::vector<double>& z, int i, int j) {
  int n = j - i;  // divided-difference order of the block
  int top = static_cast<int>(c.coeffs.size()) - 1;
  std::vector<double> ys;
  ys.reserve(n + 1);
  for (int q = i; q <= j; ++q) ys.push_back(z[q] - c.center);
  int maxd = top - n;
  if (maxd < 0) return 0.0;
  // h_d(ys) for d = 0..maxd by adding variables one at a time
  std::vector<double> h(maxd + 1, 0.0);
  h[0] = 1.0;
  for (double y : ys) {
    for (int d = 1; d <= maxd; ++d) h[d] += y * h[d - 1];
  }
  double acc = 0.0;
  for (int d = maxd; d >= 0; --d) acc += c.coeffs[n + d] * h[d];
  return acc;
}

// Smallest expansion order about the midpoint of z[begin..end) whose tail bound is below
// roundoff; 0 when no order up to maxd suffices.
int taylor_order(const Interval& dom, const std::vector<double>& z, int begin, int end, int maxd) {
  const int n = end - begin;
  const int max_tail = maxd - (n - 1);
  if (max_tail < 1) return 0;
  double c = 0.5 * (z[begin] + z[end - 1]);
  double radius = dom.boundary_distance(c);
  if (!std::isfinite(radius)) radius = 1.0 + std::abs(c);
  double q = 0.5 * (z[end - 1] - z[begin]) / radius;
  if (q >= 0.5) return 0;
  if (q == 0.0) return n;
  // bound q^tail * C(tail + n - 1, n - 1)
  double bound = 1.0;
  for (int tail = 1; tail <= max_tail; ++tail) {
    bound *= q * (tail + n - 1) / tail;
    if (bound < 1e-17) return n - 1 + tail;
  }
  return 0;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double complete_homogeneous(int degree, const std::vector<double>& ys) {
  if (degree < 0) return 0.0;
  std::vector<double> h(degree + 1, 0.0);
  h[0] = 1.0;
  for (double y : ys) {
    for (int d = 1; d <= degree; ++d) h[d] += y * h[d - 1];
  }
  return h[degree];
}

double scalar_divdiff(const ScalarFunction& f, const std::vector<double>& xs) {
  const int n = static_cast<int>(xs.size());
  if (n == 0) throw ContractViolation("divided difference needs at least one point");
  std::vector<double> z = xs;
  std::sort(z.begin(), z.end());
  const Interval& dom = f.domain();
  for (double x : z) {
    if (!dom.contains(x)) {
      throw DomainError("point " + fmt17(x) + " outside domain " + dom.to_string() + " of " + f.name());
    }
  }
  if (n == 1) return f.eval(z[0]);

  const double eps_conf = kConfluentRelative * dom.scale_width();
  const int maxd = f.max_deriv_order();
  const bool rich = maxd >= kRichOrder;

  if (int order = rich ? taylor_order(dom, z, 0, n, maxd) : 0; order > 0) {
    Cluster all;
    all.begin = 0;
    all.end = n;
    prepare_taylor(f, z, all, order);
    return taylor_block(all, z, 0, n - 1);
  }

  std::vector<Cluster> clusters;
  for (Cluster& c : split(z, 0, n, eps_conf, dom, rich)) {
    int size = c.end - c.begin;
    if (size == 1) {
      clusters.push_back(c);
      continue;
    }
    if (rich && size - 1 <= maxd) {
      int order = taylor_order(dom, z, c.begin, c.end, maxd);
      prepare_taylor(f, z, c, order > 0 ? order : std::min(maxd, size - 1 + kTaylorExtra));
      clusters.push_back(c);
      continue;
    }
    // not enough derivatives for a radius cluster: keep only truly confluent blocks
    for (Cluster& t : split(z, c.begin, c.end, eps_conf, dom, false)) {
      int ts = t.end - t.begin;
      if (ts > 1) {
        if (ts - 1 > maxd) {
          throw CapabilityError(f.name() + ": confluent cluster of multiplicity " + std::to_string(ts) +
                                " needs derivative order " + std::to_string(ts - 1) + ", oracle supplies " +
                                std::to_string(maxd));
        }
        prepare_taylor(f, z, t, maxd);
      }
      clusters.push_back(t);
    }
  }

  std::vector<int> owner(n);
  for (int ci = 0; ci < static_cast<int>(clusters.size()); ++ci) {
    for (int i = clusters[ci].begin; i < clusters[ci].end; ++i) owner[i] = ci;
  }

  // d[i] holds the divided difference over z[i..i+len]
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) {
    const Cluster& c = clusters[owner[i]];
    d[i] = c.taylor ? taylor_block(c, z, i, i) : f.eval(z[i]);
  }
  for (int len = 1; len < n; ++len) {
    for (int i = 0; i + len < n; ++i) {
      int j = i + len;
      if (owner[i] == owner[j] && clusters[owner[i]].taylor) {
        d[i] = taylor_block(clusters[owner[i]], z, i, j);
      } else {
        d[i] = (d[i + 1] - d[i]) / (z[j] - z[i]);
      }
    }
  }
  return d[0];
}

double scalar_divdiff_recursive(const ScalarFunction& f, const std::vector<double>& xs) {
  const int n = static_cast<int>(xs.size());
  if (n == 0) throw ContractViolation("divided difference needs at least one point");
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = f.eval(xs[i]);
  for (int len = 1; len < n; ++len) {
    for (int i = 0; i + len < n; ++i) {
      double den = xs[i + len] - xs[i];
      if (den == 0.0) throw ContractViolation("recursive divided difference needs distinct points");
      d[i] = (d[i + 1] - d[i]) / den;
    }
  }
  return d[0];
}

std::vector<double> equi_partition(int k) {
  if (k < 0) throw ContractViolation("partition order must be nonnegative");
  if (k == 0) return {0.0};
  std::vector<double> t(k + 1);
  for (int i = 0; i <= k; ++i) t[i] = static_cast<double>(i) / k;
  return t;
}

MatrixDivDiff matrix_divdiff_full(const ScalarFunction& f, const SymMatrix& a, const SymMatrix& b,
                                  const std::vector<double>& ts, double separation) {
  if (a.dim() != b.dim()) throw ContractViolation("A and B must have equal dimension");
  const int k1 = static_cast<int>(ts.size());
  if (k1 == 0) throw ContractViolation("partition must be nonempty");
  for (double t : ts) {
    if (!(t >= 0.0 && t <= 1.0)) throw ContractViolation("partition point " + fmt17(t) + " outside [0,1]");
  }
  for (int i = 0; i < k1; ++i) {
    for (int j = i + 1; j < k1; ++j) {
      if (std::abs(ts[i] - ts[j]) <= separation) {
        throw ConfluentPartition("partition points " + fmt17(ts[i]) + " and " + fmt17(ts[j]) +
                                 " coincide within " + fmt17(separation) +
                                 "; use directional_derivative_dk for the coincident limit");
      }
    }
  }
  const int n = a.dim();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
  double max_norm = 0.0;
  for (int l = 0; l < k1; ++l) {
    double denom = 1.0;
    for (int j = 0; j < k1; ++j) {
      if (j != l) denom *= ts[l] - ts[j];
    }
    SymMatrix xl = a * (1.0 - ts[l]) + b * ts[l];
    SymMatrix fl = apply_function(f, xl);
    Eigen::MatrixXd term = fl.mat() / denom;
    max_norm = std::max(max_norm, term.norm());
    sum += term;
  }
  MatrixDivDiff out;
  out.value = SymMatrix::from_upper(sum);
  out.max_summand_norm = max_norm;
  out.cancellation_dominated = k1 > 1 && out.value.frobenius() < kCancellationRatio * max_norm;
  return out;
}

SymMatrix matrix_divdiff(const ScalarFunction& f, const SymMatrix& a, const SymMatrix& b,
                         const std::vector<double>& ts, double separation) {
  return matrix_divdiff_full(f, a, b, ts, separation).value;
}

Eigen::MatrixXd word_sum(int l, int r, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  const Eigen::Index n = x.rows();
  if (l < 0 || r < 0) return Eigen::MatrixXd::Zero(n, n);
  // table[i][j] = sum of words with i letters x and j letters y
  std::vector<std::vector<Eigen::MatrixXd>> table(l + 1, std::vector<Eigen::MatrixXd>(r + 1));
  for (int i = 0; i <= l; ++i) {
    for (int j = 0; j <= r; ++j) {
      if (i == 0 && j == 0) {
        table[i][j] = Eigen::MatrixXd::Identity(n, n);
        continue;
      }
      Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
      if (i > 0) acc += x * table[i - 1][j];
      if (j > 0) acc += y * table[i][j - 1];
      table[i][j] = std::move(acc);
    }
  }
  return table[l][r];
}

SymMatrix monomial_divdiff_oracle(int m, const SymMatrix& a, const SymMatrix& b, const std::vector<double>& ts,
                                  int k) {
  if (m < 0) throw ContractViolation("monomial degree must be nonnegative");
  if (static_cast<int>(ts.size()) != k + 1) throw ContractViolation("partition must have k+1 points");
  const int n = a.dim();
  if (k > m) return SymMatrix::zero(n);
  Eigen::MatrixXd d = (b - a).mat();
  const Eigen::MatrixXd& am = a.mat();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  for (int l = k; l <= m; ++l) {
    acc += complete_homogeneous(l - k, ts) * word_sum(l, m - l, d, am);
  }
  return SymMatrix::from_upper(0.5 * (acc + acc.transpose()));
}

}  // namespace ktone
