#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ktone/catalog.hpp"
#include "ktone/tonecheck.hpp"

namespace ktone {

/// Observed sign class from definition checks of f and -f; an inconclusive run counts as not refuted.
struct Classification {
  Tonicity observed = Tonicity::neither;
  ToneReport plus_report;
  ToneReport minus_report;
};

Classification classify_observed(const ScalarFunction& f, const Interval& interval, const CheckOptions& opts);

struct SweepRow {
  std::string family;
  double param = 0.0;
  std::string function;
  int k = 1;
  Tonicity observed = Tonicity::neither;
  std::optional<Tonicity> expected;
  bool agree = true;
  bool proof_omitted = false;
  /// Present on rows observed as neither: the refutation of f (the one of -f is kept alongside).
  std::optional<ToneReport> refutation;
  std::optional<ToneReport> negated_refutation;
};

struct SweepResult {
  std::string family;
  std::vector<double> params;
  int kmin = 1;
  int kmax = 1;
  CheckOptions options;
  std::vector<SweepRow> rows;
  int disagreements = 0;
};

/// Classifies family:param for every param and k in [kmin, kmax] on the entry's table interval
/// (or `interval` when given) and compares with the shipped table.
SweepResult run_sweep(const std::string& family, const std::vector<double>& params, int kmin, int kmax,
                      const CheckOptions& opts, std::optional<Interval> interval = std::nullopt);

struct ReplayResult {
  bool reproduced = false;
  double stored_min_eig = 0.0;
  double replayed_min_eig = 0.0;
  double threshold = 0.0;
  bool violates = false;
  Counterexample replayed;
};

/// Rebuilds the function from its catalog name and re-evaluates the stored counterexample;
/// reproduced means the eigenvalue matches within `match_tol` and still violates the threshold.
ReplayResult replay(const ToneReport& report, double match_tol = 1e-12);

}  // namespace ktone
