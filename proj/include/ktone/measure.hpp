#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ktone/interval.hpp"
#include "ktone/scalar_function.hpp"
#include "ktone/tonecheck.hpp"

namespace ktone {

enum class Support { symmetric_unit, half_line };

struct DiscreteMeasure {
  std::vector<double> lambdas;
  std::vector<double> weights;
  Support support = Support::symmetric_unit;
  /// Upper end of the support on the half line.
  double lambda_max = 1.0;
  /// Leading coefficient, half line only.
  std::optional<double> gamma;

  std::size_t size() const { return lambdas.size(); }
  double total_mass() const;
  /// Throws ContractViolation on negative weights or atoms outside the support.
  void validate() const;
};

double mass_within(const DiscreteMeasure& mu, double center, double radius);

/// `taylor[l] = f^(l)(alpha)/l!` for l < order (default k); the atoms carry weight lambda^(order - k)
/// for a measure fitted at order k.
double eval_repr_m11(const DiscreteMeasure& mu, const std::vector<double>& taylor, double alpha, int k, double x,
                     std::optional<int> order = std::nullopt);
/// Half-line form; for order > k the coefficient gamma drops out and the atom sum carries (-1)^(order - k).
double eval_repr_0inf(const DiscreteMeasure& mu, const std::vector<double>& taylor, double alpha, int k, double x,
                      std::optional<int> order = std::nullopt);

/// f^(l)(alpha)/l! for l < n.
std::vector<double> taylor_coefficients(const ScalarFunction& f, double alpha, int n);

/// Fitted k-th divided difference at a tuple.
double fitted_divdiff(const DiscreteMeasure& mu, const std::vector<double>& xs);

struct FitOptions {
  int grid_size = 201;
  /// Half line: largest grid atom.
  double lambda_max = 1e3;
  int tuples = 400;
  double confluent_fraction = 0.3;
  /// Sampling range for tuple points; unset picks [-0.95, 0.95] or [1e-2, 1e2].
  std::optional<double> x_lo;
  std::optional<double> x_hi;
  std::uint64_t seed = 0;
  double tikhonov = 1e-10;
  /// Relative residual above which the fit is reported as failed.
  double tol = 1e-3;
  int threads = 1;
};

struct FitResult {
  std::string function;
  int k = 1;
  DiscreteMeasure measure;
  double residual = 0.0;
  double kkt = 0.0;
  int iterations = 0;
  bool converged = false;
  bool ok = false;
  int rows = 0;
  std::string grid;
  FitOptions options;
};

std::vector<double> chebyshev_extrema(int n);
std::vector<double> half_line_grid(int n, double lambda_max);

FitResult fit_measure_m11(const ScalarFunction& f, int k, const FitOptions& opts = {});
FitResult fit_measure_0inf(const ScalarFunction& f, int k, const FitOptions& opts = {});

struct IntegrabilityProxy {
  int m = 0;
  double value = 0.0;
  /// Deciding mass sits in the grid cells nearest the singular end.
  bool indeterminate = false;
  bool predicts_plus = false;
  bool predicts_minus = false;
};

struct SupportClassification {
  double total_mass = 0.0;
  double nonneg_fraction = 0.0;
  double nonpos_fraction = 0.0;
  /// f and -f at order k+1 respectively.
  bool predicts_plus_next = false;
  bool predicts_minus_next = false;
  std::vector<IntegrabilityProxy> proxies;
  /// Half line: mass in the top grid cell, a hint of support escaping past the grid.
  bool tail_escape = false;
};

SupportClassification classify_support(const DiscreteMeasure& mu, int k, double tol = 1e-3);

struct ProfileRow {
  int order = 0;
  Verdict plus = Verdict::pass;
  Verdict minus = Verdict::pass;
};

struct MonotonicityProfile {
  std::string function;
  int max_order = 0;
  std::vector<ProfileRow> rows;
  bool absolutely_monotone = false;
  bool completely_monotone = false;
  std::string classification;
  /// Half line: second derivative vanishes on the samples.
  std::optional<bool> affine;
  bool consistent = true;
};

MonotonicityProfile monotonicity_profile(const ScalarFunction& f, const Interval& interval, int max_order,
                                         const CheckOptions& opts);

struct LimitDiagnostics {
  int k = 1;
  double at_zero = 0.0;
  bool zero_unbounded = false;
  double at_infinity = 0.0;
  bool infinity_unbounded = false;
  bool zero_sign_ok = true;
  bool infinity_sign_ok = true;
  std::optional<double> gamma;
  std::optional<bool> gamma_agrees;
};

/// Extrapolated lim x f(x) at 0 and lim f(x)/x^k at infinity on geometric meshes.
LimitDiagnostics limit_diagnostics(const ScalarFunction& f, int k, std::optional<double> gamma = std::nullopt,
                                   double lambda_max = 1e3, double tol = 1e-6, double gamma_tol = 0.05);

}  // namespace ktone
