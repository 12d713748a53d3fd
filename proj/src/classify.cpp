#include "ktone/classify.hpp"

#include <cmath>

#include "ktone/errors.hpp"

namespace ktone {

Classification classify_observed(const ScalarFunction& f, const Interval& interval, const CheckOptions& opts) {
  Classification out;
  out.plus_report = check_definition(f, interval, opts);
  out.minus_report = check_definition(negate(f), interval, opts);
  bool plus = out.plus_report.verdict != Verdict::refuted;
  bool minus = out.minus_report.verdict != Verdict::refuted;
  if (plus && minus) {
    out.observed = Tonicity::both;
  } else if (plus) {
    out.observed = Tonicity::plus;
  } else if (minus) {
    out.observed = Tonicity::minus;
  } else {
    out.observed = Tonicity::neither;
  }
  return out;
}

SweepResult run_sweep(const std::string& family, const std::vector<double>& params, int kmin, int kmax,
                      const CheckOptions& opts, std::optional<Interval> interval) {
  if (kmin < 1 || kmax < kmin) throw ConfigError("sweep needs 1 <= kmin <= kmax");
  SweepResult out;
  out.family = family;
  out.params = params;
  out.kmin = kmin;
  out.kmax = kmax;
  out.options = opts;
  for (double p : params) {
    CatalogEntry entry = parse_function(entry_name(family, p));
    Interval iv = interval.value_or(parse_interval(entry.table_interval));
    for (int k = kmin; k <= kmax; ++k) {
      CheckOptions o = opts;
      o.k = k;
      Classification c = classify_observed(entry.function, iv, o);
      SweepRow row;
      row.family = family;
      row.param = p;
      row.function = entry.name();
      row.k = k;
      row.observed = c.observed;
      row.proof_omitted = entry.proof_omitted;
      try {
        row.expected = expected_tonicity(entry, k);
      } catch (const CapabilityError&) {
        row.expected.reset();
      }
      row.agree = !row.expected || *row.expected == row.observed;
      if (c.observed == Tonicity::neither) {
        row.refutation = c.plus_report;
        row.negated_refutation = c.minus_report;
      }
      if (!row.agree) ++out.disagreements;
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

ReplayResult replay(const ToneReport& report, double match_tol) {
  if (!report.counterexample) throw ContractViolation("report carries no counterexample to replay");
  CatalogEntry entry = parse_function(report.function);
  const Counterexample& ce = *report.counterexample;
  ReplayResult out;
  out.replayed = reevaluate(entry.function, ce, report.tol);
  out.stored_min_eig = ce.min_eig;
  out.replayed_min_eig = out.replayed.min_eig;
  out.threshold = out.replayed.threshold;
  out.violates = out.replayed.min_eig < -out.replayed.threshold;
  out.reproduced = out.violates && std::abs(out.replayed_min_eig - out.stored_min_eig) <= match_tol;
  return out;
}

}  // namespace ktone
