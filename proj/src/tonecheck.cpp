#include "ktone/tonecheck.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <thread>

#include "ktone/catalog.hpp"
#include "ktone/deriv.hpp"
#include "ktone/divdiff.hpp"
#include "ktone/errors.hpp"

namespace ktone {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kBlock = 16;

struct Certificate {
  SymMatrix m;
  double min_eig = 0.0;
  double norm2 = 0.0;
  double threshold = 0.0;
  double margin = 0.0;
  bool violated = false;
  bool cancellation = false;
};

Certificate assess(SymMatrix m, double tol, double roundoff_scale, bool cancellation) {
  Certificate c;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.mat(), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  c.min_eig = ev[0];
  c.norm2 = std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
  c.threshold = violation_threshold(tol, c.norm2, roundoff_scale);
  c.margin = c.min_eig / (1.0 + c.norm2);
  c.violated = c.min_eig < -c.threshold;
  c.cancellation = cancellation;
  c.m = std::move(m);
  return c;
}

Certificate definition_certificate(const ScalarFunction& f, const SymMatrix& a, const SymMatrix& b,
                                   const std::vector<double>& ts, double tol) {
  MatrixDivDiff r = matrix_divdiff_full(f, a, b, ts);
  double scale = static_cast<double>(ts.size()) * r.max_summand_norm;
  return assess(r.value, tol, scale, r.cancellation_dominated);
}

Certificate derivative_certificate(const ScalarFunction& f, const SymMatrix& a, const SymMatrix& x, int k,
                                   double tol) {
  DkResult r = directional_derivative_dk_full(f, a, x, k);
  bool cancel = r.value.frobenius() < kCancellationRatio * r.magnitude;
  return assess(r.value, tol, (k + 1) * r.magnitude, cancel);
}

double chain_scale(const ScalarFunction& f, const SymMatrix& a, const SymMatrix& b, double s, double t) {
  double fa = apply_function(f, a).frobenius();
  double fb = apply_function(f, b).frobenius();
  double fs = apply_function(f, a * (1.0 - s) + b * s).frobenius();
  double ft = apply_function(f, a * (1.0 - t) + b * t).frobenius();
  return t * (1 - t) * fs + s * t * (t - s) * fb + (1 - s) * (1 - t) * (t - s) * fa + s * (1 - s) * ft;
}

Certificate chain_certificate(const ScalarFunction& f, const SymMatrix& a, const SymMatrix& b, double s, double t,
                              double tol) {
  SymMatrix gap = chain_gap(f, a, b, s, t);
  double scale = 4.0 * chain_scale(f, a, b, s, t);
  bool cancel = gap.frobenius() < kCancellationRatio * scale;
  return assess(gap, tol, scale, cancel);
}

struct TrialOutcome {
  bool violated = false;
  bool inconclusive = false;
  double worst = kInf;
  long certificates = 0;
  std::optional<Counterexample> ce;
  std::exception_ptr error;

  void absorb(const Certificate& c) {
    ++certificates;
    worst = std::min(worst, c.margin);
    if (c.cancellation && !c.violated) inconclusive = true;
  }
};

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  int workers = std::min(threads, n);
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

using TrialFn = std::function<TrialOutcome(int dim, int trial, std::uint64_t sub_seed)>;

void run_trials(const CheckOptions& opts, const TrialFn& fn, ToneReport& rep) {
  if (opts.dims.empty()) throw ContractViolation("dims must be nonempty");
  if (opts.trials < 0) throw ContractViolation("trial count must be nonnegative");
  for (int d : opts.dims) {
    if (d < 1) throw ContractViolation("dimensions must be positive");
  }
  double worst = kInf;
  for (int dim : opts.dims) {
    for (int start = 0; start < opts.trials; start += kBlock) {
      int n = std::min(kBlock, opts.trials - start);
      std::vector<TrialOutcome> out(n);
      parallel_for(n, opts.threads, [&](int i) {
        int trial = start + i;
        try {
          out[i] = fn(dim, trial, mix_seed(opts.seed, static_cast<std::uint64_t>(dim), static_cast<std::uint64_t>(trial)));
        } catch (...) {
          out[i].error = std::current_exception();
        }
      });
      std::optional<Counterexample> found;
      for (auto& o : out) {
        if (o.error) std::rethrow_exception(o.error);
        ++rep.trials_run;
        rep.certificates += o.certificates;
        worst = std::min(worst, o.worst);
        if (o.violated) {
          if (!found) found = o.ce;
        } else if (o.inconclusive) {
          ++rep.inconclusive_trials;
        } else {
          ++rep.decisive_trials;
        }
      }
      if (found) {
        rep.verdict = Verdict::refuted;
        rep.counterexample = std::move(found);
        rep.worst_margin = std::isfinite(worst) ? worst : 0.0;
        return;
      }
    }
  }
  rep.worst_margin = std::isfinite(worst) ? worst : 0.0;
  rep.verdict = rep.decisive_trials > 0 ? Verdict::pass : Verdict::inconclusive;
}

ToneReport blank_report(const ScalarFunction& f, const Interval& interval, const CheckOptions& opts,
                        const std::string& criterion) {
  ToneReport rep;
  rep.function = f.name();
  rep.interval = interval;
  rep.k = opts.k;
  rep.dims = opts.dims;
  rep.trials = opts.trials;
  rep.partitions_per_trial = opts.partitions_per_trial;
  rep.seed = opts.seed;
  rep.tol = opts.tol;
  rep.criteria = {criterion};
  rep.symmetric_directions = opts.symmetric_directions;
  return rep;
}

void require_inside(const ScalarFunction& f, const Interval& interval) {
  interval.validate();
  if (!f.domain().contains_interval(interval)) {
    throw DomainError("interval " + interval.to_string() + " not inside domain " + f.domain().to_string() + " of " +
                      f.name());
  }
}

std::vector<std::vector<double>> trial_partitions(int k, int count, std::uint64_t sub_seed) {
  std::vector<std::vector<double>> parts{equi_partition(k)};
  if (k < 2) return parts;
  std::mt19937_64 rng(mix_seed(sub_seed, 0x7061727469ULL));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int p = 1; p < count; ++p) {
    std::vector<double> ts;
    for (int attempt = 0; attempt < 32; ++attempt) {
      ts.assign(k + 1, 0.0);
      ts[k] = 1.0;
      for (int i = 1; i < k; ++i) ts[i] = u(rng);
      std::sort(ts.begin(), ts.end());
      double gap = kInf;
      for (int i = 1; i <= k; ++i) gap = std::min(gap, ts[i] - ts[i - 1]);
      if (gap >= 1e-3) break;
    }
    parts.push_back(ts);
  }
  return parts;
}

Counterexample make_ce(const std::string& criterion, int dim, int trial, std::uint64_t sub, const SymMatrix& a,
                       const SymMatrix& b, std::vector<double> partition, const Certificate& c) {
  Counterexample ce;
  ce.criterion = criterion;
  ce.dim = dim;
  ce.trial = trial;
  ce.sub_seed = sub;
  ce.a = a;
  ce.b = b;
  ce.partition = std::move(partition);
  ce.violating = c.m;
  ce.min_eig = c.min_eig;
  ce.threshold = c.threshold;
  return ce;
}

/// Principal-submatrix reduction, then the equi-partition when it still violates.
void shrink_definition(const ScalarFunction& f, double tol, Counterexample& ce) {
  bool changed = true;
  while (changed && ce.a.dim() > 1) {
    changed = false;
    for (int i = 0; i < ce.a.dim(); ++i) {
      SymMatrix a2 = ce.a.drop_index(i);
      SymMatrix b2 = ce.b.drop_index(i);
      Certificate c = definition_certificate(f, a2, b2, ce.partition, tol);
      if (c.violated) {
        ce.a = a2;
        ce.b = b2;
        ce.violating = c.m;
        ce.min_eig = c.min_eig;
        ce.threshold = c.threshold;
        ce.shrunk = true;
        changed = true;
        break;
      }
    }
  }
  int k = static_cast<int>(ce.partition.size()) - 1;
  std::vector<double> equi = equi_partition(k);
  if (ce.partition != equi) {
    Certificate c = definition_certificate(f, ce.a, ce.b, equi, tol);
    if (c.violated) {
      ce.partition = equi;
      ce.violating = c.m;
      ce.min_eig = c.min_eig;
      ce.threshold = c.threshold;
      ce.shrunk = true;
    }
  }
  ce.dim = ce.a.dim();
}

void shrink_derivative(const ScalarFunction& f, int k, double tol, Counterexample& ce) {
  bool changed = true;
  while (changed && ce.a.dim() > 1) {
    changed = false;
    for (int i = 0; i < ce.a.dim(); ++i) {
      SymMatrix a2 = ce.a.drop_index(i);
      SymMatrix x2 = ce.b.drop_index(i);
      Certificate c = derivative_certificate(f, a2, x2, k, tol);
      if (c.violated) {
        ce.a = a2;
        ce.b = x2;
        ce.violating = c.m;
        ce.min_eig = c.min_eig;
        ce.threshold = c.threshold;
        ce.shrunk = true;
        changed = true;
        break;
      }
    }
  }
  ce.dim = ce.a.dim();
}

std::vector<double> default_alphas(const Interval& interval) {
  auto [w0, w1] = interval.window();
  return {w0 + 0.2 * (w1 - w0), w0 + 0.5 * (w1 - w0), w0 + 0.8 * (w1 - w0)};
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::refuted: return "refuted";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Verdict parse_verdict(const std::string& s) {
  if (s == "pass") return Verdict::pass;
  if (s == "refuted") return Verdict::refuted;
  if (s == "inconclusive") return Verdict::inconclusive;
  throw ParseError("unknown verdict '" + s + "'");
}

double violation_threshold(double tol, double norm2, double roundoff_scale) {
  return std::max(tol * (1.0 + norm2), 64.0 * kEps * roundoff_scale);
}

Counterexample reevaluate(const ScalarFunction& f, const Counterexample& ce, double tol) {
  Certificate c;
  if (ce.criterion == "definition") {
    c = definition_certificate(f, ce.a, ce.b, ce.partition, tol);
  } else if (ce.criterion == "derivative") {
    c = derivative_certificate(f, ce.a, ce.b, ce.order, tol);
  } else if (ce.criterion == "remainder") {
    c = definition_certificate(remainder_function(f, ce.order, ce.alpha), ce.a, ce.b, ce.partition, tol);
  } else if (ce.criterion == "chain") {
    if (ce.partition.size() != 2) throw ContractViolation("chain counterexample needs (s, t)");
    c = chain_certificate(f, ce.a, ce.b, ce.partition[0], ce.partition[1], tol);
  } else {
    throw ContractViolation("unknown counterexample criterion '" + ce.criterion + "'");
  }
  Counterexample out = ce;
  out.violating = c.m;
  out.min_eig = c.min_eig;
  out.threshold = c.threshold;
  return out;
}

// ---------------------------------------------------------------- definition

ToneReport check_definition(const ScalarFunction& f, const Interval& interval, const CheckOptions& opts) {
  if (opts.k < 1) throw ContractViolation("k must be at least 1");
  if (opts.partitions_per_trial < 1) throw ContractViolation("need at least one partition per trial");
  require_inside(f, interval);
  ToneReport rep = blank_report(f, interval, opts, "definition");
  const int k = opts.k;
  auto trial = [&](int dim, int t, std::uint64_t sub) {
    TrialOutcome out;
    auto [a, b] = random_ordered_pair(interval, dim, sub);
    for (const auto& ts : trial_partitions(k, opts.partitions_per_trial, sub)) {
      Certificate c = definition_certificate(f, a, b, ts, opts.tol);
      out.absorb(c);
      if (c.violated) {
        out.violated = true;
        out.ce = make_ce("definition", dim, t, sub, a, b, ts, c);
        break;
      }
    }
    return out;
  };
  run_trials(opts, trial, rep);
  if (rep.counterexample) shrink_definition(f, opts.tol, *rep.counterexample);
  return rep;
}

// ---------------------------------------------------------------- derivative

ToneReport check_derivative(const ScalarFunction& f, const Interval& interval, const CheckOptions& opts) {
  if (opts.k < 1) throw ContractViolation("k must be at least 1");
  if (opts.symmetric_directions && opts.k % 2 != 0) {
    throw ContractViolation("symmetric directions are only valid for even k");
  }
  require_inside(f, interval);
  ToneReport rep = blank_report(f, interval, opts, "derivative");
  const int k = opts.k;
  auto trial = [&](int dim, int t, std::uint64_t sub) {
    TrialOutcome out;
    auto [a, b] = random_ordered_pair(interval, dim, sub);
    SymMatrix x = b - a;
    if (opts.symmetric_directions) {
      double s = std::max(x.spectral_norm(), 1e-3 * interval.scale_width());
      x = random_symmetric(dim, mix_seed(sub, 0x73796dULL), s);
    }
    Certificate c = derivative_certificate(f, a, x, k, opts.tol);
    out.absorb(c);
    if (c.violated) {
      out.violated = true;
      out.ce = make_ce("derivative", dim, t, sub, a, x, {}, c);
      out.ce->order = k;
    }
    return out;
  };
  run_trials(opts, trial, rep);
  if (rep.counterexample) shrink_derivative(f, k, opts.tol, *rep.counterexample);
  return rep;
}

// ---------------------------------------------------------------- remainder

ScalarFunction remainder_function(const ScalarFunction& f, int k, double alpha) {
  if (k < 1) throw ContractViolation("k must be at least 1");
  if (k == 1) return f;
  if (!f.domain().contains(alpha)) throw DomainError("base point outside domain of " + f.name());
  int max_order = f.max_deriv_order() - (k - 1);
  if (max_order < 0) {
    throw CapabilityError(f.name() + " lacks derivative order " + std::to_string(k - 1) + " for the remainder");
  }
  std::string name = "rem:" + std::to_string(k) + ":" + format_number(alpha) + ":" + f.name();
  return ScalarFunction(name, f.domain(), max_order, [f, k, alpha](int m, double x) {
    std::vector<double> pts(m + 1, x);
    pts.insert(pts.end(), k - 1, alpha);
    double fact = 1.0;
    for (int i = 2; i <= m; ++i) fact *= i;
    return fact * scalar_divdiff(f, pts);
  });
}

ToneReport check_remainder_monotone(const ScalarFunction& f, const Interval& interval, const CheckOptions& opts) {
  if (opts.k < 1) throw ContractViolation("k must be at least 1");
  require_inside(f, interval);
  ToneReport rep = blank_report(f, interval, opts, "remainder");
  rep.alphas = opts.alphas.empty() ? default_alphas(interval) : opts.alphas;
  double worst = kInf;
  bool any_pass = false;
  for (std::size_t i = 0; i < rep.alphas.size(); ++i) {
    double alpha = rep.alphas[i];
    if (!interval.contains(alpha)) throw ContractViolation("base point must lie inside the interval");
    ScalarFunction g = remainder_function(f, opts.k, alpha);
    CheckOptions inner = opts;
    inner.k = 1;
    inner.seed = mix_seed(opts.seed, 0x616c706861ULL, i);
    ToneReport r = check_definition(g, interval, inner);
    rep.certificates += r.certificates;
    rep.trials_run += r.trials_run;
    rep.decisive_trials += r.decisive_trials;
    rep.inconclusive_trials += r.inconclusive_trials;
    worst = std::min(worst, r.worst_margin);
    if (r.verdict == Verdict::refuted) {
      Counterexample ce = *r.counterexample;
      ce.criterion = "remainder";
      ce.alpha = alpha;
      ce.order = opts.k;
      rep.counterexample = ce;
      rep.verdict = Verdict::refuted;
      rep.worst_margin = worst;
      return rep;
    }
    if (r.verdict == Verdict::pass) any_pass = true;
  }
  rep.worst_margin = std::isfinite(worst) ? worst : 0.0;
  rep.verdict = any_pass ? Verdict::pass : Verdict::inconclusive;
  return rep;
}

// ---------------------------------------------------------------- point tests

PointCheck check_pencil(const ScalarFunction& f, const Interval& interval, int k, const std::vector<double>& points,
                        double tol) {
  if (k < 1) throw ContractViolation("k must be at least 1");
  if (points.empty()) throw ContractViolation("pencil needs at least one point");
  for (double x : points) {
    if (!interval.contains(x)) throw DomainError("pencil point outside interval " + interval.to_string());
  }
  int n = static_cast<int>(points.size());
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      std::vector<double> pts{points[i], points[j]};
      pts.insert(pts.end(), k - 1, points[0]);
      double v = scalar_divdiff(f, pts);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  PointCheck out;
  out.matrix = SymMatrix::from_upper(m);
  out.min_eig = min_eig(out.matrix);
  out.verdict = is_psd(out.matrix, tol) ? Verdict::pass : Verdict::refuted;
  return out;
}

PointCheck check_hankel(const ScalarFunction& f, const Interval& interval, int k, int n, double x, double tol) {
  if (k < 0 || n < 1) throw ContractViolation("hankel test needs k >= 0 and n >= 1");
  if (!interval.contains(x)) throw DomainError("hankel point outside interval " + interval.to_string());
  if (f.max_deriv_order() < 2 * n - 2 + k) {
    throw CapabilityError(f.name() + " lacks derivative order " + std::to_string(2 * n - 2 + k));
  }
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      int order = i + j + k;
      double fact = 1.0;
      for (int q = 2; q <= order; ++q) fact *= q;
      double v = f.deriv(order, x) / fact;
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  PointCheck out;
  out.matrix = SymMatrix::from_upper(m);
  out.min_eig = min_eig(out.matrix);
  out.verdict = is_psd(out.matrix, tol) ? Verdict::pass : Verdict::refuted;
  return out;
}

InterpolationCheck check_interpolation_sign(const ScalarFunction& f, const Interval& interval, int k,
                                            const std::vector<double>& nodes, const std::vector<double>& probes,
                                            double tol) {
  if (k < 1 || static_cast<int>(nodes.size()) != k) throw ContractViolation("need exactly k interpolation nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!interval.contains(nodes[i])) throw DomainError("node outside interval " + interval.to_string());
    if (i > 0 && !(nodes[i] > nodes[i - 1])) throw ContractViolation("nodes must be strictly ascending");
  }
  std::vector<double> fv(k);
  for (int l = 0; l < k; ++l) fv[l] = f.eval(nodes[l]);
  InterpolationCheck out;
  out.worst = kInf;
  for (double x : probes) {
    if (!interval.contains(x)) continue;
    if (std::find(nodes.begin(), nodes.end(), x) != nodes.end()) continue;
    double p = 0.0;
    double pabs = 0.0;
    for (int l = 0; l < k; ++l) {
      double basis = 1.0;
      for (int m = 0; m < k; ++m) {
        if (m != l) basis *= (x - nodes[m]) / (nodes[l] - nodes[m]);
      }
      p += fv[l] * basis;
      pabs += std::abs(fv[l] * basis);
    }
    double fx = f.eval(x);
    int below = static_cast<int>(std::lower_bound(nodes.begin(), nodes.end(), x) - nodes.begin());
    double sign = ((k - below) % 2 == 0) ? 1.0 : -1.0;
    double scale = 1.0 + std::abs(fx) + pabs;
    double v = sign * (fx - p) / scale;
    ++out.probes;
    if (v < out.worst) {
      out.worst = v;
      out.worst_probe = x;
    }
  }
  if (!std::isfinite(out.worst)) out.worst = 0.0;
  out.verdict = out.worst >= -tol ? Verdict::pass : Verdict::refuted;
  return out;
}

InterpolationCheck check_derivative_convexity(const ScalarFunction& f, const Interval& interval, int k,
                                              int samples) {
  if (k < 2) throw ContractViolation("convexity of f^(k-2) needs k >= 2");
  auto [w0, w1] = interval.window();
  InterpolationCheck out;
  out.worst = kInf;
  for (int i = 0; i < samples; ++i) {
    double x = w0 + (w1 - w0) * (i + 0.5) / samples;
    double d2 = f.deriv(k, x);
    double scale = 1.0 + std::abs(f.deriv(k - 2, x));
    double v = d2 / scale;
    ++out.probes;
    if (v < out.worst) {
      out.worst = v;
      out.worst_probe = x;
    }
  }
  out.verdict = out.worst >= -1e-8 ? Verdict::pass : Verdict::refuted;
  return out;
}

// ---------------------------------------------------------------- cone chain

ConeChainReport check_cone_chain(const ScalarFunction& f, const Interval& interval, int lmax,
                                 const CheckOptions& opts, std::optional<double> alpha) {
  if (lmax < 1) throw ContractViolation("cone chain needs lmax >= 1");
  require_inside(f, interval);
  ConeChainReport out;
  out.function = f.name();
  out.k = opts.k;
  out.lmax = lmax;
  out.alpha = alpha ? *alpha : (interval.lo_finite() ? interval.lo : interval.window().first);
  std::set<std::pair<std::string, int>> seen;
  auto run = [&](const std::string& rule, const ScalarFunction& g, int order) {
    if (!seen.insert({g.name(), order}).second) return;
    CheckOptions o = opts;
    o.k = order;
    ChainItem item;
    item.rule = rule;
    item.function = g.name();
    item.k = order;
    item.report = check_definition(g, interval, o);
    if (item.report.verdict == Verdict::refuted) out.consistent = false;
    out.items.push_back(std::move(item));
  };
  for (int l = 1; l <= lmax; ++l) run("order+2l", f, opts.k + 2 * l);
  run("shifted", shifted_product({out.alpha}, f), opts.k + 1);
  if (interval.lo == 0.0 && !interval.hi_finite()) {
    ScalarFunction neg = negate(f);
    for (int m = opts.k + 1; m <= opts.k + 2 * lmax + 1; ++m) {
      run("alternating", (m - opts.k) % 2 ? neg : f, m);
    }
  }
  return out;
}

// ---------------------------------------------------------------- chain inequality

SymMatrix chain_gap(const ScalarFunction& f, const SymMatrix& a, const SymMatrix& b, double s, double t) {
  if (!(0.0 <= s && s <= t && t <= 1.0)) throw ContractViolation("chain inequality needs 0 <= s <= t <= 1");
  Eigen::MatrixXd fa = apply_function(f, a).mat();
  Eigen::MatrixXd fb = apply_function(f, b).mat();
  Eigen::MatrixXd fs = apply_function(f, a * (1.0 - s) + b * s).mat();
  Eigen::MatrixXd ft = apply_function(f, a * (1.0 - t) + b * t).mat();
  Eigen::MatrixXd gap = t * (1 - t) * fs + s * t * (t - s) * fb - (1 - s) * (1 - t) * (t - s) * fa -
                        s * (1 - s) * ft;
  return SymMatrix::from_upper(0.5 * (gap + gap.transpose()));
}

ToneReport check_chain_inequality(const ScalarFunction& f, const Interval& interval, const CheckOptions& opts,
                                  int grid) {
  if (!f.operator_concave()) {
    throw ContractViolation(f.name() + " is not flagged operator concave; the chain inequality does not apply");
  }
  if (grid < 2) throw ContractViolation("grid needs at least two points");
  require_inside(f, interval);
  CheckOptions o = opts;
  o.k = 3;
  ToneReport rep = blank_report(f, interval, o, "chain");
  std::vector<std::pair<double, double>> st;
  for (int i = 0; i < grid; ++i) {
    for (int j = i; j < grid; ++j) st.emplace_back(double(i) / (grid - 1), double(j) / (grid - 1));
  }
  auto trial = [&](int dim, int t, std::uint64_t sub) {
    TrialOutcome out;
    auto [a, b] = random_ordered_pair(interval, dim, sub);
    for (auto [s, tt] : st) {
      // the gap vanishes identically on these lines
      if (s == tt || s == 0.0 || tt == 1.0) continue;
      Certificate c = chain_certificate(f, a, b, s, tt, opts.tol);
      out.absorb(c);
      if (c.violated) {
        out.violated = true;
        out.ce = make_ce("chain", dim, t, sub, a, b, {s, tt}, c);
        break;
      }
    }
    return out;
  };
  run_trials(o, trial, rep);
  return rep;
}

}  // namespace ktone
