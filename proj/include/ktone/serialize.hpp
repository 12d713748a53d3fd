#pragma once

#include <string>

#include "json.hpp"

#include "ktone/classify.hpp"
#include "ktone/matfun.hpp"
#include "ktone/measure.hpp"
#include "ktone/tonecheck.hpp"

namespace ktone {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "ktone.report/1";

using Json = nlohmann::json;

Json to_json(const SymMatrix& m);
SymMatrix matrix_from_json(const Json& j);

Json to_json(const Interval& iv);
Interval interval_from_json(const Json& j);

Json to_json(const Counterexample& ce);
Counterexample counterexample_from_json(const Json& j);

/// Body of a ToneReport without envelope fields.
Json to_json(const ToneReport& r);
ToneReport report_from_json(const Json& j);

Json to_json(const ConeChainReport& r);
Json to_json(const SweepResult& s);
Json to_json(const FitResult& f);
Json to_json(const SupportClassification& c);
Json to_json(const MonotonicityProfile& p);
Json to_json(const LimitDiagnostics& d);
Json to_json(const ReplayResult& r);

/// Adds schema_version, kind, library version, provenance and (optionally) a timestamp.
Json envelope(const std::string& kind, Json body, const Json& provenance, bool timestamp = true);
/// Removes fields excluded from report comparison.
Json strip_volatile(Json j);

std::string sweep_csv(const SweepResult& s);
/// (lambda, w) rows; gamma goes to the JSON sidecar.
std::string measure_csv(const DiscreteMeasure& mu);
Json measure_sidecar(const FitResult& f);
std::string report_csv(const ToneReport& r);

/// Whitespace or comma separated rows; blank lines and '#' comments ignored.
SymMatrix parse_matrix_text(const std::string& text);
std::string format_matrix_text(const SymMatrix& m);
/// Accepts JSON ({"dim", "data"} or nested rows) or plain text.
SymMatrix parse_matrix(const std::string& text);

}  // namespace ktone
