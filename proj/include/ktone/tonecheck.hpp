#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ktone/matfun.hpp"
#include "ktone/scalar_function.hpp"

namespace ktone {

enum class Verdict { pass, refuted, inconclusive };

std::string to_string(Verdict v);
Verdict parse_verdict(const std::string& s);

struct CheckOptions {
  int k = 1;
  std::vector<int> dims{1, 2, 3, 4, 5};
  int trials = 200;
  int partitions_per_trial = 4;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  int threads = 1;
  /// Derivative check: draw directions from all symmetric matrices (even k only).
  bool symmetric_directions = false;
  /// Remainder check: base points; empty selects three points inside the sampling window.
  std::vector<double> alphas;
};

struct Counterexample {
  /// "definition", "derivative", "remainder", "chain"
  std::string criterion;
  int dim = 0;
  int trial = 0;
  std::uint64_t sub_seed = 0;
  SymMatrix a;
  /// B for definition, remainder and chain; the direction X for derivative.
  SymMatrix b;
  /// Partition for definition and remainder; (s, t) for chain.
  std::vector<double> partition;
  /// Remainder base point and order of the tested function.
  double alpha = 0.0;
  int order = 0;
  SymMatrix violating;
  double min_eig = 0.0;
  double threshold = 0.0;
  bool shrunk = false;
};

struct ToneReport {
  std::string function;
  Interval interval;
  int k = 1;
  std::vector<int> dims;
  int trials = 0;
  int partitions_per_trial = 0;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  Verdict verdict = Verdict::pass;
  std::optional<Counterexample> counterexample;
  /// Most negative min_eig / (1 + ||M||_2) seen over all certificates.
  double worst_margin = 0.0;
  std::vector<std::string> criteria;
  long certificates = 0;
  long trials_run = 0;
  long decisive_trials = 0;
  long inconclusive_trials = 0;
  std::vector<double> alphas;
  bool symmetric_directions = false;
};

/// Relative PSD threshold with a rounding floor proportional to the term magnitude.
double violation_threshold(double tol, double norm2, double roundoff_scale);

/// Recomputes the violating matrix, min_eig and threshold of a stored counterexample;
/// `f` is the function the report was issued for.
Counterexample reevaluate(const ScalarFunction& f, const Counterexample& ce, double tol);

ToneReport check_definition(const ScalarFunction& f, const Interval& interval, const CheckOptions& opts);
ToneReport check_derivative(const ScalarFunction& f, const Interval& interval, const CheckOptions& opts);

/// g(x) = f[x, alpha, ..., alpha] with alpha repeated k-1 times; derivatives from confluent divided differences.
ScalarFunction remainder_function(const ScalarFunction& f, int k, double alpha);
ToneReport check_remainder_monotone(const ScalarFunction& f, const Interval& interval, const CheckOptions& opts);

struct PointCheck {
  Verdict verdict = Verdict::pass;
  SymMatrix matrix;
  double min_eig = 0.0;
};

/// [f[x_i, x_j, x_1, ..., x_1]] with x_1 repeated k-1 times.
PointCheck check_pencil(const ScalarFunction& f, const Interval& interval, int k, const std::vector<double>& points,
                        double tol = 1e-8);
/// [f^(i+j+k)(x) / (i+j+k)!] for i, j < n.
PointCheck check_hankel(const ScalarFunction& f, const Interval& interval, int k, int n, double x,
                        double tol = 1e-8);

struct InterpolationCheck {
  Verdict verdict = Verdict::pass;
  double worst = 0.0;
  double worst_probe = 0.0;
  int probes = 0;
};

/// Sign pattern (-1)^(k - j(x)) (f(x) - P(x)) >= 0 of the interpolant through k nodes.
InterpolationCheck check_interpolation_sign(const ScalarFunction& f, const Interval& interval, int k,
                                            const std::vector<double>& nodes, const std::vector<double>& probes,
                                            double tol = 1e-8);

/// Sampled convexity of f^(k-2) through nonnegativity of f^(k) on a grid.
InterpolationCheck check_derivative_convexity(const ScalarFunction& f, const Interval& interval, int k,
                                              int samples = 200);

struct ChainItem {
  std::string rule;
  std::string function;
  int k = 0;
  ToneReport report;
};

struct ConeChainReport {
  std::string function;
  int k = 0;
  int lmax = 0;
  double alpha = 0.0;
  std::vector<ChainItem> items;
  bool consistent = true;
};

/// Predicted consequences of k-tonicity: orders k+2l, the shifted product at k+1, and on (0,inf) the
/// alternating signs at orders k+1 .. k+2*lmax+1.
ConeChainReport check_cone_chain(const ScalarFunction& f, const Interval& interval, int lmax,
                                 const CheckOptions& opts, std::optional<double> alpha = std::nullopt);

/// Gap of the three-point concavity chain for operator concave f on (0, inf).
SymMatrix chain_gap(const ScalarFunction& f, const SymMatrix& a, const SymMatrix& b, double s, double t);
ToneReport check_chain_inequality(const ScalarFunction& f, const Interval& interval, const CheckOptions& opts,
                                  int grid = 10);

}  // namespace ktone
