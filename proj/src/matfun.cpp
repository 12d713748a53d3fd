#include "ktone/matfun.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include "ktone/errors.hpp"

namespace ktone {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------- Interval

Interval Interval::open(double lo, double hi, double margin, double cap) {
  Interval iv{lo, hi, margin, cap};
  iv.validate();
  return iv;
}

Interval Interval::real_line(double cap) { return open(-kInf, kInf, 0.05, cap); }
Interval Interval::positive(double margin, double cap) { return open(0.0, kInf, margin, cap); }
Interval Interval::symmetric_unit(double margin) { return open(-1.0, 1.0, margin, 10.0); }

bool Interval::lo_finite() const { return std::isfinite(lo); }
bool Interval::hi_finite() const { return std::isfinite(hi); }

void Interval::validate() const {
  if (std::isnan(lo) || std::isnan(hi) || !(lo < hi)) {
    throw ConfigError("interval requires lo < hi, got " + to_string());
  }
  if (lo == kInf || hi == -kInf) throw ConfigError("degenerate interval " + to_string());
  if (!(margin > 0.0) || !std::isfinite(margin)) throw ConfigError("interval margin must be positive");
  if (!(cap > 0.0) || !std::isfinite(cap)) throw ConfigError("sampling cap must be positive");
  if (lo_finite() && hi_finite() && !(margin < 0.5 * (hi - lo))) {
    throw ConfigError("margin " + fmt17(margin) + " too large for interval " + to_string());
  }
  auto [a, b] = window();
  if (!(a < b)) throw ConfigError("empty sampling window for interval " + to_string());
}

double Interval::boundary_distance(double x) const {
  double d = kInf;
  if (lo_finite()) d = std::min(d, x - lo);
  if (hi_finite()) d = std::min(d, hi - x);
  return d;
}

std::pair<double, double> Interval::window() const {
  if (lo_finite() && hi_finite()) return {lo + margin, hi - margin};
  if (lo_finite()) return {lo + margin, lo + cap};
  if (hi_finite()) return {hi - cap, hi - margin};
  return {-cap, cap};
}

double Interval::scale_width() const {
  if (lo_finite() && hi_finite()) return hi - lo;
  auto [a, b] = window();
  return b - a;
}

bool Interval::contains_interval(const Interval& inner) const { return inner.lo >= lo && inner.hi <= hi; }

std::string format_bound(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return fmt17(v);
}

std::string Interval::to_string() const { return "(" + format_bound(lo) + "," + format_bound(hi) + ")"; }

Interval parse_interval(const std::string& text, double margin, double cap) {
  std::string s;
  for (char c : text) {
    if (c != '(' && c != ')' && c != '[' && c != ']' && c != ' ') s.push_back(c);
  }
  auto comma = s.find(',');
  if (comma == std::string::npos) throw ParseError("interval must be 'lo,hi', got '" + text + "'");
  auto bound = [&](const std::string& t) -> double {
    if (t == "inf" || t == "+inf" || t == "infinity") return kInf;
    if (t == "-inf" || t == "-infinity") return -kInf;
    try {
      std::size_t used = 0;
      double v = std::stod(t, &used);
      if (used != t.size()) throw ParseError("bad interval bound '" + t + "'");
      return v;
    } catch (const std::logic_error&) {
      throw ParseError("bad interval bound '" + t + "'");
    }
  };
  return Interval::open(bound(s.substr(0, comma)), bound(s.substr(comma + 1)), margin, cap);
}

// ---------------------------------------------------------------- SymMatrix

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw ContractViolation("symmetric matrix must be square and nonempty");
  if (!m.allFinite()) throw ContractViolation("matrix has non-finite entries");
  double scale = 1.0 + m.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - m(j, i)) > 1e-12 * scale) {
        throw ContractViolation("matrix not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::from_upper(const Eigen::MatrixXd& m) {
  SymMatrix s;
  s.m_ = m.triangularView<Eigen::Upper>();
  s.m_.triangularView<Eigen::StrictlyLower>() = m.transpose().triangularView<Eigen::StrictlyLower>();
  return s;
}

SymMatrix SymMatrix::zero(int n) { return from_upper(Eigen::MatrixXd::Zero(n, n)); }
SymMatrix SymMatrix::identity(int n) { return from_upper(Eigen::MatrixXd::Identity(n, n)); }
SymMatrix SymMatrix::diagonal(const Eigen::VectorXd& d) { return from_upper(d.asDiagonal().toDenseMatrix()); }

double SymMatrix::max_abs() const { return m_.size() ? m_.cwiseAbs().maxCoeff() : 0.0; }

double SymMatrix::spectral_norm() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
  if (dim() != o.dim()) throw ContractViolation("dimension mismatch in matrix sum");
  SymMatrix r;
  r.m_ = m_ + o.m_;
  return r;
}

SymMatrix SymMatrix::operator-(const SymMatrix& o) const {
  if (dim() != o.dim()) throw ContractViolation("dimension mismatch in matrix difference");
  SymMatrix r;
  r.m_ = m_ - o.m_;
  return r;
}

SymMatrix SymMatrix::operator-() const {
  SymMatrix r;
  r.m_ = -m_;
  return r;
}

SymMatrix SymMatrix::operator*(double c) const {
  SymMatrix r;
  r.m_ = c * m_;
  return r;
}

SymMatrix operator*(double c, const SymMatrix& a) { return a * c; }

SymMatrix SymMatrix::drop_index(int skip) const {
  int n = dim();
  if (n <= 1 || skip < 0 || skip >= n) throw ContractViolation("cannot drop index from matrix");
  Eigen::MatrixXd r(n - 1, n - 1);
  for (int i = 0, ri = 0; i < n; ++i) {
    if (i == skip) continue;
    for (int j = 0, rj = 0; j < n; ++j) {
      if (j == skip) continue;
      r(ri, rj++) = m_(i, j);
    }
    ++ri;
  }
  SymMatrix s;
  s.m_ = r;
  return s;
}

SymMatrix SymMatrix::direct_sum(double scalar) const {
  int n = dim();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n + 1, n + 1);
  r.topLeftCorner(n, n) = m_;
  r(n, n) = scalar;
  SymMatrix s;
  s.m_ = r;
  return s;
}

SymMatrix SymMatrix::congruence(const Eigen::MatrixXd& u) const {
  Eigen::MatrixXd r = u * m_ * u.transpose();
  SymMatrix s;
  s.m_ = 0.5 * (r + r.transpose());
  return s;
}

// ---------------------------------------------------------------- spectral

SpectralDecomposition eigh(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.mat());
  if (es.info() != Eigen::Success) throw NumericalFailure("symmetric eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

SymMatrix reconstruct(const SpectralDecomposition& sd, const Eigen::VectorXd& values) {
  const Eigen::MatrixXd& q = sd.eigenvectors;
  Eigen::MatrixXd r = q * values.asDiagonal() * q.transpose();
  return SymMatrix::from_upper(0.5 * (r + r.transpose()));
}

SymMatrix apply_function(const ScalarFunction& f, const SpectralDecomposition& sd) {
  Eigen::VectorXd v(sd.eigenvalues.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double lam = sd.eigenvalues[i];
    if (!f.domain().contains(lam)) {
      throw DomainError("eigenvalue " + fmt17(lam) + " outside domain " + f.domain().to_string() + " of " +
                        f.name());
    }
    v[i] = f.eval(lam);
  }
  return reconstruct(sd, v);
}

SymMatrix apply_function(const ScalarFunction& f, const SymMatrix& a) { return apply_function(f, eigh(a)); }

double min_eig(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.mat(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

double max_eig(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.mat(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()[es.eigenvalues().size() - 1];
}

bool is_psd(const SymMatrix& a, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.mat(), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  double norm = std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
  return ev[0] >= -tol * (1.0 + norm);
}

// ---------------------------------------------------------------- sampling

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  auto splitmix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return splitmix(splitmix(splitmix(seed) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

namespace {

Eigen::MatrixXd gaussian(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::MatrixXd g(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) g(i, j) = nd(rng);
  }
  return g;
}

Eigen::MatrixXd haar_orthogonal(std::mt19937_64& rng, int n) {
  Eigen::MatrixXd g = gaussian(rng, n, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

/// Rounds the upper triangle to multiples of `grid` and mirrors it.
Eigen::MatrixXd quantize(const Eigen::MatrixXd& m, double grid) {
  int n = static_cast<int>(m.rows());
  Eigen::MatrixXd r(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double v = std::nearbyint(m(i, j) / grid) * grid;
      r(i, j) = v;
      r(j, i) = v;
    }
  }
  return r;
}

double window_grid(double a, double b) {
  double scale = std::max({std::abs(a), std::abs(b), b - a, 1e-300});
  return std::ldexp(1.0, std::ilogb(scale) - 44);
}

}  // namespace

Eigen::MatrixXd random_orthogonal(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return haar_orthogonal(rng, dim);
}

SymMatrix random_symmetric(int dim, std::uint64_t seed, double scale) {
  if (dim < 1) throw ContractViolation("dimension must be positive");
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd g = gaussian(rng, dim, dim);
  Eigen::MatrixXd s = (g + g.transpose()) * (0.5 * scale / std::sqrt(static_cast<double>(dim)));
  return SymMatrix::from_upper(s);
}

SymMatrix random_in_window(const Interval& interval, int dim, std::uint64_t seed) {
  if (dim < 1) throw ContractViolation("dimension must be positive");
  interval.validate();
  auto [w0, w1] = interval.window();
  double width = w1 - w0;
  double a = w0 + 1e-9 * width;
  double b = w1 - 1e-9 * width;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd q = haar_orthogonal(rng, dim);
  Eigen::VectorXd lam(dim);
  for (int i = 0; i < dim; ++i) lam[i] = a + (b - a) * u(rng);
  Eigen::MatrixXd m = q * lam.asDiagonal() * q.transpose();
  return SymMatrix::from_upper(quantize(0.5 * (m + m.transpose()), window_grid(w0, w1)));
}

std::pair<SymMatrix, SymMatrix> random_ordered_pair(const Interval& interval, int dim, std::uint64_t seed) {
  if (dim < 1) throw ContractViolation("dimension must be positive");
  interval.validate();
  auto [w0, w1] = interval.window();
  double width = w1 - w0;
  // keep a sliver away from the window edges so rounding cannot push spectra out
  double lo = w0 + 1e-9 * width;
  double hi = w1 - 1e-9 * width;
  double span = hi - lo;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  double frac = 0.1 + 0.85 * u01(rng);
  double offset = (1.0 - frac) * span * 0.9 * u01(rng);

  Eigen::MatrixXd q = haar_orthogonal(rng, dim);
  Eigen::MatrixXd g = gaussian(rng, dim, dim);
  Eigen::MatrixXd goe = 0.5 * (g + g.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(goe, Eigen::EigenvaluesOnly);
  Eigen::VectorXd s = es.eigenvalues();
  Eigen::VectorXd lam(dim);
  double smin = s.minCoeff();
  double srange = s.maxCoeff() - smin;
  for (int i = 0; i < dim; ++i) {
    double pos = srange > 0 ? (s[i] - smin) / srange : u01(rng);
    lam[i] = lo + offset + frac * span * pos;
  }
  double amax = lam.maxCoeff();
  Eigen::MatrixXd a = q * lam.asDiagonal() * q.transpose();

  int rank = 1 + static_cast<int>(u01(rng) * dim);
  rank = std::min(rank, dim);
  Eigen::MatrixXd l = gaussian(rng, dim, rank);
  Eigen::MatrixXd p0 = l * l.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ps(p0, Eigen::EigenvaluesOnly);
  double pmax = ps.eigenvalues()[dim - 1];
  p0 += (1e-6 * pmax) * Eigen::MatrixXd::Identity(dim, dim);
  pmax *= 1.0 + 1e-6;
  double room = hi - amax;
  double c = (0.02 + 0.98 * u01(rng)) * room / pmax;
  Eigen::MatrixXd p = c * p0;

  double grid = window_grid(w0, w1);
  Eigen::MatrixXd aq = quantize(0.5 * (a + a.transpose()), grid);
  Eigen::MatrixXd pq = quantize(0.5 * (p + p.transpose()), grid);
  SymMatrix am = SymMatrix::from_upper(aq);
  SymMatrix bm = SymMatrix::from_upper(aq + pq);
  return {am, bm};
}

}  // namespace ktone
