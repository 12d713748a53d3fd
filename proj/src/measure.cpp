#include "ktone/measure.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "ktone/catalog.hpp"
#include "ktone/divdiff.hpp"
#include "ktone/errors.hpp"
#include "ktone/nnls.hpp"

namespace ktone {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kZeroAtom = 1e-14;

void check_order(int k, std::optional<int> order, std::size_t taylor_size) {
  if (k < 1) throw ContractViolation("representation order must be at least 1");
  int n = order.value_or(k);
  if (n < k) throw ContractViolation("evaluation order must not be below the fitted order");
  if (static_cast<int>(taylor_size) != n) {
    throw ContractViolation("expected " + std::to_string(n) + " Taylor coefficients, got " +
                            std::to_string(taylor_size));
  }
}

double poly_part(const std::vector<double>& taylor, double h) {
  double s = 0.0;
  for (std::size_t l = taylor.size(); l-- > 0;) s = s * h + taylor[l];
  return s;
}

template <class Fn>
void parallel_rows(int rows, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, rows));
  if (threads == 1) {
    for (int i = 0; i < rows; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < rows; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::vector<std::vector<double>> sample_tuples(int k, const FitOptions& opts, double lo, double hi, bool log_scale) {
  std::mt19937_64 rng(mix_seed(opts.seed, 0x6669742d7475706cULL, static_cast<std::uint64_t>(k)));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&] {
    double r = u(rng);
    return log_scale ? std::exp(std::log(lo) + r * (std::log(hi) - std::log(lo))) : lo + r * (hi - lo);
  };
  int confluent = static_cast<int>(std::lround(opts.confluent_fraction * opts.tuples));
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(opts.tuples));
  for (int i = 0; i < opts.tuples; ++i) {
    std::vector<double> xs(static_cast<std::size_t>(k + 1));
    if (i < confluent) {
      double a = draw();
      xs[0] = draw();
      for (int j = 1; j <= k; ++j) xs[static_cast<std::size_t>(j)] = a;
    } else {
      for (auto& x : xs) x = draw();
      std::sort(xs.begin(), xs.end());
    }
    out.push_back(std::move(xs));
  }
  return out;
}

std::string describe_grid(const std::string& kind, int n, double lambda_max) {
  std::ostringstream os;
  os << kind << ":" << n;
  if (kind == "halfline") os << ":lambda_max=" << format_number(lambda_max);
  return os.str();
}

FitResult finish_fit(const ScalarFunction& f, int k, const FitOptions& opts, DiscreteMeasure mu,
                     const Eigen::MatrixXd& design, const Eigen::VectorXd& target, bool with_gamma,
                     std::string grid) {
  NnlsResult sol = nnls(design, target, opts.tikhonov);
  FitResult out;
  out.function = f.name();
  out.k = k;
  out.options = opts;
  out.rows = static_cast<int>(design.rows());
  out.grid = std::move(grid);
  const std::size_t n = mu.lambdas.size();
  mu.weights.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) mu.weights[j] = std::max(0.0, sol.x[static_cast<Eigen::Index>(j)]);
  if (with_gamma) mu.gamma = std::max(0.0, sol.x[static_cast<Eigen::Index>(n)]);
  out.measure = std::move(mu);
  double bn = target.norm();
  out.residual = bn > 0 ? sol.residual_norm / bn : sol.residual_norm;
  out.kkt = sol.kkt;
  out.iterations = sol.iterations;
  out.converged = sol.converged;
  out.ok = out.residual <= opts.tol;
  return out;
}

}  // namespace

double DiscreteMeasure::total_mass() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

void DiscreteMeasure::validate() const {
  if (lambdas.size() != weights.size()) throw ContractViolation("measure atoms and weights differ in length");
  double lo = support == Support::symmetric_unit ? -1.0 : 0.0;
  double hi = support == Support::symmetric_unit ? 1.0 : lambda_max;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(weights[i] >= 0)) throw ContractViolation("negative measure weight");
    if (!(lambdas[i] >= lo && lambdas[i] <= hi)) throw ContractViolation("atom outside the declared support");
  }
  if (gamma) {
    if (support != Support::half_line) throw ContractViolation("leading coefficient only exists on the half line");
    if (!(*gamma >= 0)) throw ContractViolation("negative leading coefficient");
  }
}

double mass_within(const DiscreteMeasure& mu, double center, double radius) {
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (std::abs(mu.lambdas[i] - center) <= radius) s += mu.weights[i];
  }
  return s;
}

double eval_repr_m11(const DiscreteMeasure& mu, const std::vector<double>& taylor, double alpha, int k, double x,
                     std::optional<int> order) {
  check_order(k, order, taylor.size());
  if (!(std::abs(x) < 1.0) || !(std::abs(alpha) < 1.0)) {
    throw DomainError("representation on (-1,1) evaluated outside the interval");
  }
  const int n = order.value_or(k);
  const double h = x - alpha;
  double atoms = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double lam = mu.lambdas[i];
    double px = 1.0 - lam * x;
    double pa = 1.0 - lam * alpha;
    if (px <= 0.0 || pa <= 0.0) throw DomainError("pole crossing at lambda = " + format_number(lam));
    atoms += mu.weights[i] * std::pow(lam, n - k) / (px * std::pow(pa, n));
  }
  return poly_part(taylor, h) + std::pow(h, n) * atoms;
}

double eval_repr_0inf(const DiscreteMeasure& mu, const std::vector<double>& taylor, double alpha, int k, double x,
                      std::optional<int> order) {
  check_order(k, order, taylor.size());
  if (!(x > 0.0) || !(alpha > 0.0)) throw DomainError("representation on (0,inf) needs positive arguments");
  const int n = order.value_or(k);
  const double h = x - alpha;
  double atoms = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double lam = mu.lambdas[i];
    atoms += mu.weights[i] / ((x + lam) * std::pow(alpha + lam, n));
  }
  double sign = (n - k) % 2 == 0 ? 1.0 : -1.0;
  double lead = (n == k && mu.gamma) ? *mu.gamma * std::pow(h, k) : 0.0;
  return poly_part(taylor, h) + lead + sign * std::pow(h, n) * atoms;
}

std::vector<double> taylor_coefficients(const ScalarFunction& f, double alpha, int n) {
  std::vector<double> out(static_cast<std::size_t>(std::max(n, 0)));
  double fact = 1.0;
  for (int l = 0; l < n; ++l) {
    if (l > 0) fact *= l;
    out[static_cast<std::size_t>(l)] = f.deriv(l, alpha) / fact;
  }
  return out;
}

double fitted_divdiff(const DiscreteMeasure& mu, const std::vector<double>& xs) {
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double lam = mu.lambdas[i];
    double kern = 1.0;
    for (double x : xs) kern /= mu.support == Support::symmetric_unit ? (1.0 - lam * x) : (x + lam);
    s += mu.weights[i] * kern;
  }
  if (mu.gamma) s += *mu.gamma;
  return s;
}

std::vector<double> chebyshev_extrema(int n) {
  if (n < 2) throw ContractViolation("grid needs at least two nodes");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] = -std::cos(kPi * j / (n - 1));
  out.front() = -1.0;
  out.back() = 1.0;
  if (n % 2 == 1) out[static_cast<std::size_t>(n / 2)] = 0.0;
  return out;
}

std::vector<double> half_line_grid(int n, double lambda_max) {
  if (n < 2) throw ContractViolation("grid needs at least two nodes");
  if (!(lambda_max > 1e-3)) throw ContractViolation("lambda_max must exceed 1e-3");
  std::vector<double> out{0.0};
  const double a = std::log(1e-3), b = std::log(lambda_max);
  for (int j = 0; j < n - 1; ++j) out.push_back(std::exp(a + (b - a) * j / std::max(1, n - 2)));
  out.back() = lambda_max;
  return out;
}

FitResult fit_measure_m11(const ScalarFunction& f, int k, const FitOptions& opts) {
  if (k < 1) throw ContractViolation("k must be at least 1");
  if (f.max_deriv_order() < k) throw CapabilityError("fit needs derivatives up to order " + std::to_string(k));
  double lo = opts.x_lo.value_or(-0.95), hi = opts.x_hi.value_or(0.95);
  if (!(lo > -1.0 && hi < 1.0 && lo < hi)) throw ConfigError("tuple range must lie inside (-1,1)");
  DiscreteMeasure mu;
  mu.support = Support::symmetric_unit;
  mu.lambdas = chebyshev_extrema(opts.grid_size);
  auto tuples = sample_tuples(k, opts, lo, hi, false);
  const int rows = static_cast<int>(tuples.size());
  const int cols = static_cast<int>(mu.lambdas.size());
  Eigen::MatrixXd design(rows, cols);
  Eigen::VectorXd target(rows);
  parallel_rows(rows, opts.threads, [&](int i) {
    const auto& xs = tuples[static_cast<std::size_t>(i)];
    for (int j = 0; j < cols; ++j) {
      double lam = mu.lambdas[static_cast<std::size_t>(j)];
      double kern = 1.0;
      for (double x : xs) kern /= (1.0 - lam * x);
      design(i, j) = kern;
    }
    target[i] = scalar_divdiff(f, xs);
  });
  return finish_fit(f, k, opts, std::move(mu), design, target, false,
                    describe_grid("chebyshev", opts.grid_size, 1.0));
}

FitResult fit_measure_0inf(const ScalarFunction& f, int k, const FitOptions& opts) {
  if (k < 1) throw ContractViolation("k must be at least 1");
  if (f.max_deriv_order() < k) throw CapabilityError("fit needs derivatives up to order " + std::to_string(k));
  double lo = opts.x_lo.value_or(1e-2), hi = opts.x_hi.value_or(1e2);
  if (!(lo > 0.0 && lo < hi)) throw ConfigError("tuple range must lie inside (0,inf)");
  DiscreteMeasure mu;
  mu.support = Support::half_line;
  mu.lambda_max = opts.lambda_max;
  mu.lambdas = half_line_grid(opts.grid_size, opts.lambda_max);
  auto tuples = sample_tuples(k, opts, lo, hi, true);
  const int rows = static_cast<int>(tuples.size());
  const int cols = static_cast<int>(mu.lambdas.size());
  Eigen::MatrixXd design(rows, cols + 1);
  Eigen::VectorXd target(rows);
  parallel_rows(rows, opts.threads, [&](int i) {
    const auto& xs = tuples[static_cast<std::size_t>(i)];
    for (int j = 0; j < cols; ++j) {
      double lam = mu.lambdas[static_cast<std::size_t>(j)];
      double kern = 1.0;
      for (double x : xs) kern /= (x + lam);
      design(i, j) = kern;
    }
    design(i, cols) = 1.0;
    target[i] = scalar_divdiff(f, xs);
  });
  return finish_fit(f, k, opts, std::move(mu), design, target, true,
                    describe_grid("halfline", opts.grid_size, opts.lambda_max));
}

SupportClassification classify_support(const DiscreteMeasure& mu, int k, double tol) {
  SupportClassification out;
  double total = mu.total_mass();
  out.total_mass = total;
  double nonneg = 0.0, nonpos = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu.lambdas[i] >= -kZeroAtom) nonneg += mu.weights[i];
    if (mu.lambdas[i] <= kZeroAtom) nonpos += mu.weights[i];
  }
  out.nonneg_fraction = total > 0 ? nonneg / total : 1.0;
  out.nonpos_fraction = total > 0 ? nonpos / total : 1.0;

  if (mu.support == Support::symmetric_unit) {
    out.predicts_plus_next = 1.0 - out.nonneg_fraction <= tol;
    out.predicts_minus_next = 1.0 - out.nonpos_fraction <= tol;
    double cell = 1.0;
    for (double lam : mu.lambdas) {
      if (std::abs(lam) > kZeroAtom) cell = std::min(cell, std::abs(lam));
    }
    double near_zero = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      double a = std::abs(mu.lambdas[i]);
      if (a > kZeroAtom && a <= 1.5 * cell) near_zero += mu.weights[i];
    }
    bool indeterminate = total > 0 && near_zero > tol * total;
    for (int m = 1; m < k; ++m) {
      IntegrabilityProxy p;
      p.m = m;
      const int d = k - m;
      for (std::size_t i = 0; i < mu.size(); ++i) {
        double a = std::abs(mu.lambdas[i]);
        if (a > kZeroAtom) p.value += mu.weights[i] / std::pow(a, d);
      }
      p.indeterminate = indeterminate;
      if (d % 2 == 0) {
        p.predicts_plus = !indeterminate;
      } else {
        p.predicts_plus = !indeterminate && out.predicts_plus_next;
        p.predicts_minus = !indeterminate && out.predicts_minus_next;
      }
      out.proxies.push_back(p);
    }
  } else {
    double scale = total + mu.gamma.value_or(0.0);
    out.predicts_minus_next = true;
    out.predicts_plus_next = scale == 0.0 || total <= tol * scale;
    double top = 0.0;
    double cutoff = mu.lambda_max;
    if (mu.size() >= 2) cutoff = mu.lambdas[mu.size() - 2];
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (mu.lambdas[i] > cutoff) top += mu.weights[i];
    }
    out.tail_escape = total > 0 && top > tol * total;
    for (int m = 1; m < k; ++m) {
      IntegrabilityProxy p;
      p.m = m;
      for (std::size_t i = 0; i < mu.size(); ++i) p.value += mu.weights[i] / std::pow(1.0 + mu.lambdas[i], m + 1);
      p.indeterminate = out.tail_escape;
      bool decided = !p.indeterminate;
      if ((k - m) % 2 == 0) {
        p.predicts_plus = decided;
      } else {
        p.predicts_minus = decided;
      }
      out.proxies.push_back(p);
    }
  }
  return out;
}

namespace {

Verdict scalar_nonneg(const ScalarFunction& f, const Interval& interval, double tol) {
  auto [lo, hi] = interval.window();
  for (int i = 0; i <= 200; ++i) {
    double x = lo + (hi - lo) * i / 200.0;
    double v = f.eval(x);
    if (v < -tol * (1.0 + std::abs(v))) return Verdict::refuted;
  }
  return Verdict::pass;
}

}  // namespace

MonotonicityProfile monotonicity_profile(const ScalarFunction& f, const Interval& interval, int max_order,
                                         const CheckOptions& opts) {
  if (max_order < 0) throw ContractViolation("profile order must be nonnegative");
  if (f.max_deriv_order() < max_order) {
    throw CapabilityError("profile needs derivatives up to order " + std::to_string(max_order));
  }
  MonotonicityProfile out;
  out.function = f.name();
  out.max_order = max_order;
  ScalarFunction neg = negate(f);
  bool all_plus = true, alternating = true;
  for (int j = 0; j <= max_order; ++j) {
    ProfileRow row;
    row.order = j;
    if (j == 0) {
      row.plus = scalar_nonneg(f, interval, opts.tol);
      row.minus = scalar_nonneg(neg, interval, opts.tol);
    } else {
      CheckOptions o = opts;
      o.k = j;
      o.symmetric_directions = false;
      row.plus = check_derivative(f, interval, o).verdict;
      row.minus = check_derivative(neg, interval, o).verdict;
    }
    all_plus = all_plus && row.plus == Verdict::pass;
    alternating = alternating && (j % 2 == 0 ? row.plus : row.minus) == Verdict::pass;
    out.rows.push_back(row);
  }
  out.absolutely_monotone = all_plus;
  out.completely_monotone = alternating;
  if (all_plus && alternating) {
    out.classification = "absolutely and completely monotone";
  } else if (all_plus) {
    out.classification = "absolutely monotone";
  } else if (alternating) {
    out.classification = "completely monotone";
  } else {
    out.classification = "neither";
  }
  if (interval.lo == 0.0 && !interval.hi_finite()) {
    if (f.max_deriv_order() >= 2) {
      auto [lo, hi] = interval.window();
      bool flat = true;
      for (int i = 0; i <= 50; ++i) {
        double x = lo * std::pow(hi / lo, i / 50.0);
        double d2 = f.deriv(2, x);
        double d1 = f.deriv(1, x);
        if (std::abs(d2) * (1.0 + x) > 1e-8 * (1.0 + std::abs(d1) + std::abs(f.eval(x)) / (1.0 + x))) flat = false;
      }
      out.affine = flat;
      if (out.absolutely_monotone && !flat) out.consistent = false;
    }
  }
  return out;
}

namespace {

struct Extrapolated {
  double value = 0.0;
  bool unbounded = false;
};

Extrapolated extrapolate(const std::vector<double>& s) {
  Extrapolated out;
  const std::size_t n = s.size();
  if (n == 0) return out;
  double last = s.back();
  if (!std::isfinite(last) || std::abs(last) > 1e8) {
    out.unbounded = true;
    out.value = last;
    return out;
  }
  if (n < 3) {
    out.value = last;
    return out;
  }
  double d1 = s[n - 2] - s[n - 3];
  double d2 = s[n - 1] - s[n - 2];
  if (std::abs(d2) >= std::abs(d1) && std::abs(d2) > 0 && std::abs(last) >= 1e3) {
    out.unbounded = true;
    out.value = last;
    return out;
  }
  double denom = d2 - d1;
  if (std::abs(d1) > 0 && std::abs(d2 / d1) < 1.0 && std::abs(denom) > 1e-14 * (1.0 + std::abs(last))) {
    out.value = last - d2 * d2 / denom;
  } else {
    out.value = last;
  }
  return out;
}

}  // namespace

LimitDiagnostics limit_diagnostics(const ScalarFunction& f, int k, std::optional<double> gamma, double lambda_max,
                                   double tol, double gamma_tol) {
  if (k < 1) throw ContractViolation("k must be at least 1");
  const Interval& d = f.domain();
  if (d.lo > 0.0 || d.hi_finite()) throw DomainError("limit diagnostics need a function defined on (0,inf)");
  LimitDiagnostics out;
  out.k = k;
  std::vector<double> zero_seq;
  for (int j = 1; j <= 40; ++j) {
    double x = std::ldexp(1.0, -j);
    zero_seq.push_back(x * f.eval(x));
  }
  std::vector<double> inf_seq;
  const double cap = lambda_max * 1e3;
  for (int j = 1; std::ldexp(1.0, j) <= cap; ++j) {
    double x = std::ldexp(1.0, j);
    inf_seq.push_back(f.eval(x) / std::pow(x, k));
  }
  auto z = extrapolate(zero_seq);
  auto inf = extrapolate(inf_seq);
  out.at_zero = z.value;
  out.zero_unbounded = z.unbounded;
  out.at_infinity = inf.value;
  out.infinity_unbounded = inf.unbounded;
  if (z.unbounded) {
    out.zero_sign_ok = k % 2 == 1 ? z.value < 0 : z.value > 0;
  } else {
    out.zero_sign_ok = k % 2 == 1 ? z.value <= tol : z.value >= -tol;
  }
  out.infinity_sign_ok = !inf.unbounded && inf.value >= -tol;
  if (gamma) {
    out.gamma = gamma;
    out.gamma_agrees = !inf.unbounded && std::abs(inf.value - *gamma) <= gamma_tol;
  }
  return out;
}

}  // namespace ktone
