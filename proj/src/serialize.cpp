#include "ktone/serialize.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <sstream>

#include "ktone/errors.hpp"

namespace ktone {

namespace {

Json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double num_from(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ParseError("expected a number, got " + j.dump());
}

template <class T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad field '") + key + "': " + e.what());
  }
}

double dfield(const Json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  return num_from(j.at(key));
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string csv_number(double v) { return format_number(v); }

Json opt_tonicity(const std::optional<Tonicity>& t) { return t ? Json(to_string(*t)) : Json(nullptr); }

}  // namespace

Json to_json(const SymMatrix& m) {
  Json data = Json::array();
  for (int i = 0; i < m.dim(); ++i) {
    for (int j = 0; j < m.dim(); ++j) data.push_back(num(m(i, j)));
  }
  return Json{{"dim", m.dim()}, {"data", data}};
}

SymMatrix matrix_from_json(const Json& j) {
  if (j.is_array()) {
    const int n = static_cast<int>(j.size());
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) {
      if (!j[i].is_array() || static_cast<int>(j[i].size()) != n) throw ParseError("matrix rows must be square");
      for (int c = 0; c < n; ++c) m(i, c) = num_from(j[i][c]);
    }
    return SymMatrix(m);
  }
  const int n = field<int>(j, "dim");
  const Json& data = j.at("data");
  if (n < 0 || !data.is_array() || static_cast<int>(data.size()) != n * n) {
    throw ParseError("matrix data length does not match dim");
  }
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < n; ++c) m(i, c) = num_from(data[static_cast<std::size_t>(i * n + c)]);
  }
  return SymMatrix(m);
}

Json to_json(const Interval& iv) {
  return Json{{"lo", num(iv.lo)}, {"hi", num(iv.hi)}, {"margin", iv.margin}, {"cap", iv.cap}};
}

Interval interval_from_json(const Json& j) {
  if (j.is_string()) return parse_interval(j.get<std::string>());
  Interval iv;
  iv.lo = dfield(j, "lo");
  iv.hi = dfield(j, "hi");
  if (j.contains("margin")) iv.margin = dfield(j, "margin");
  if (j.contains("cap")) iv.cap = dfield(j, "cap");
  iv.validate();
  return iv;
}

Json to_json(const Counterexample& ce) {
  Json part = Json::array();
  for (double t : ce.partition) part.push_back(num(t));
  return Json{{"criterion", ce.criterion}, {"dim", ce.dim},           {"trial", ce.trial},
              {"sub_seed", ce.sub_seed},   {"a", to_json(ce.a)},      {"b", to_json(ce.b)},
              {"partition", part},         {"alpha", num(ce.alpha)},  {"order", ce.order},
              {"violating", to_json(ce.violating)}, {"min_eig", num(ce.min_eig)},
              {"threshold", num(ce.threshold)},     {"shrunk", ce.shrunk}};
}

Counterexample counterexample_from_json(const Json& j) {
  Counterexample ce;
  ce.criterion = field<std::string>(j, "criterion");
  ce.dim = field<int>(j, "dim");
  ce.trial = field<int>(j, "trial");
  ce.sub_seed = field<std::uint64_t>(j, "sub_seed");
  ce.a = matrix_from_json(j.at("a"));
  ce.b = matrix_from_json(j.at("b"));
  for (const auto& t : j.at("partition")) ce.partition.push_back(num_from(t));
  ce.alpha = dfield(j, "alpha");
  ce.order = field<int>(j, "order");
  ce.violating = matrix_from_json(j.at("violating"));
  ce.min_eig = dfield(j, "min_eig");
  ce.threshold = dfield(j, "threshold");
  ce.shrunk = j.value("shrunk", false);
  return ce;
}

Json to_json(const ToneReport& r) {
  Json alphas = Json::array();
  for (double a : r.alphas) alphas.push_back(num(a));
  Json j{{"function", r.function},
         {"interval", to_json(r.interval)},
         {"k", r.k},
         {"dims", r.dims},
         {"trials", r.trials},
         {"partitions_per_trial", r.partitions_per_trial},
         {"seed", r.seed},
         {"tol", r.tol},
         {"verdict", to_string(r.verdict)},
         {"worst_margin", num(r.worst_margin)},
         {"criteria", r.criteria},
         {"certificates", r.certificates},
         {"trials_run", r.trials_run},
         {"decisive_trials", r.decisive_trials},
         {"inconclusive_trials", r.inconclusive_trials},
         {"alphas", alphas},
         {"symmetric_directions", r.symmetric_directions}};
  j["counterexample"] = r.counterexample ? to_json(*r.counterexample) : Json(nullptr);
  return j;
}

ToneReport report_from_json(const Json& in) {
  const Json& j = in.contains("data") && in.at("data").is_object() ? in.at("data") : in;
  if (in.contains("schema_version")) {
    auto v = in.at("schema_version").get<std::string>();
    if (v != kReportSchema) throw ParseError("unsupported schema_version '" + v + "'");
  }
  ToneReport r;
  r.function = field<std::string>(j, "function");
  r.interval = interval_from_json(j.at("interval"));
  r.k = field<int>(j, "k");
  r.dims = field<std::vector<int>>(j, "dims");
  r.trials = field<int>(j, "trials");
  r.partitions_per_trial = field<int>(j, "partitions_per_trial");
  r.seed = field<std::uint64_t>(j, "seed");
  r.tol = dfield(j, "tol");
  r.verdict = parse_verdict(field<std::string>(j, "verdict"));
  r.worst_margin = dfield(j, "worst_margin");
  r.criteria = field<std::vector<std::string>>(j, "criteria");
  r.certificates = j.value("certificates", 0L);
  r.trials_run = j.value("trials_run", 0L);
  r.decisive_trials = j.value("decisive_trials", 0L);
  r.inconclusive_trials = j.value("inconclusive_trials", 0L);
  if (j.contains("alphas")) {
    for (const auto& a : j.at("alphas")) r.alphas.push_back(num_from(a));
  }
  r.symmetric_directions = j.value("symmetric_directions", false);
  if (j.contains("counterexample") && !j.at("counterexample").is_null()) {
    r.counterexample = counterexample_from_json(j.at("counterexample"));
  }
  return r;
}

Json to_json(const ConeChainReport& r) {
  Json items = Json::array();
  for (const auto& it : r.items) {
    items.push_back(Json{{"rule", it.rule}, {"function", it.function}, {"k", it.k}, {"report", to_json(it.report)}});
  }
  return Json{{"function", r.function}, {"k", r.k},         {"lmax", r.lmax},
              {"alpha", num(r.alpha)},  {"items", items}, {"consistent", r.consistent}};
}

Json to_json(const SweepResult& s) {
  Json rows = Json::array();
  for (const auto& row : s.rows) {
    Json jr{{"family", row.family},   {"param", num(row.param)},        {"function", row.function},
            {"k", row.k},             {"observed", to_string(row.observed)}, {"expected", opt_tonicity(row.expected)},
            {"agree", row.agree},     {"proof_omitted", row.proof_omitted}};
    if (row.refutation) jr["refutation"] = to_json(*row.refutation);
    if (row.negated_refutation) jr["negated_refutation"] = to_json(*row.negated_refutation);
    rows.push_back(std::move(jr));
  }
  Json params = Json::array();
  for (double p : s.params) params.push_back(num(p));
  return Json{{"family", s.family},
              {"params", params},
              {"kmin", s.kmin},
              {"kmax", s.kmax},
              {"dims", s.options.dims},
              {"trials", s.options.trials},
              {"partitions_per_trial", s.options.partitions_per_trial},
              {"seed", s.options.seed},
              {"tol", s.options.tol},
              {"rows", rows},
              {"disagreements", s.disagreements}};
}

Json to_json(const FitResult& f) {
  const auto& mu = f.measure;
  Json atoms = Json::array();
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu.weights[i] > 0) atoms.push_back(Json::array({num(mu.lambdas[i]), num(mu.weights[i])}));
  }
  Json j = measure_sidecar(f);
  j["atoms"] = atoms;
  return j;
}

Json measure_sidecar(const FitResult& f) {
  const auto& mu = f.measure;
  Json j{{"function", f.function},
         {"k", f.k},
         {"support", mu.support == Support::symmetric_unit ? "[-1,1]" : "[0," + format_number(mu.lambda_max) + "]"},
         {"gamma", mu.gamma ? num(*mu.gamma) : Json(nullptr)},
         {"total_mass", num(mu.total_mass())},
         {"residual", num(f.residual)},
         {"kkt", num(f.kkt)},
         {"iterations", f.iterations},
         {"converged", f.converged},
         {"ok", f.ok},
         {"rows", f.rows},
         {"grid", f.grid},
         {"tuples", f.options.tuples},
         {"confluent_fraction", f.options.confluent_fraction},
         {"tikhonov", f.options.tikhonov},
         {"tol", f.options.tol},
         {"seed", f.options.seed}};
  return j;
}

Json to_json(const SupportClassification& c) {
  Json proxies = Json::array();
  for (const auto& p : c.proxies) {
    proxies.push_back(Json{{"m", p.m},
                           {"value", num(p.value)},
                           {"indeterminate", p.indeterminate},
                           {"predicts_plus", p.predicts_plus},
                           {"predicts_minus", p.predicts_minus}});
  }
  return Json{{"total_mass", num(c.total_mass)},
              {"nonneg_fraction", num(c.nonneg_fraction)},
              {"nonpos_fraction", num(c.nonpos_fraction)},
              {"predicts_plus_next", c.predicts_plus_next},
              {"predicts_minus_next", c.predicts_minus_next},
              {"tail_escape", c.tail_escape},
              {"proxies", proxies}};
}

Json to_json(const MonotonicityProfile& p) {
  Json rows = Json::array();
  for (const auto& r : p.rows) {
    rows.push_back(Json{{"order", r.order}, {"plus", to_string(r.plus)}, {"minus", to_string(r.minus)}});
  }
  return Json{{"function", p.function},
              {"max_order", p.max_order},
              {"rows", rows},
              {"absolutely_monotone", p.absolutely_monotone},
              {"completely_monotone", p.completely_monotone},
              {"classification", p.classification},
              {"affine", p.affine ? Json(*p.affine) : Json(nullptr)},
              {"consistent", p.consistent}};
}

Json to_json(const LimitDiagnostics& d) {
  return Json{{"k", d.k},
              {"at_zero", num(d.at_zero)},
              {"zero_unbounded", d.zero_unbounded},
              {"at_infinity", num(d.at_infinity)},
              {"infinity_unbounded", d.infinity_unbounded},
              {"zero_sign_ok", d.zero_sign_ok},
              {"infinity_sign_ok", d.infinity_sign_ok},
              {"gamma", d.gamma ? num(*d.gamma) : Json(nullptr)},
              {"gamma_agrees", d.gamma_agrees ? Json(*d.gamma_agrees) : Json(nullptr)}};
}

Json to_json(const ReplayResult& r) {
  return Json{{"reproduced", r.reproduced},
              {"stored_min_eig", num(r.stored_min_eig)},
              {"replayed_min_eig", num(r.replayed_min_eig)},
              {"threshold", num(r.threshold)},
              {"violates", r.violates},
              {"counterexample", to_json(r.replayed)}};
}

Json envelope(const std::string& kind, Json body, const Json& provenance, bool timestamp) {
  Json j{{"schema_version", kReportSchema},
         {"kind", kind},
         {"library", Json{{"name", "ktone"}, {"version", kVersion}}},
         {"provenance", provenance},
         {"data", std::move(body)}};
  if (timestamp) j["timestamp"] = utc_timestamp();
  return j;
}

Json strip_volatile(Json j) {
  if (j.is_object()) j.erase("timestamp");
  return j;
}

std::string sweep_csv(const SweepResult& s) {
  std::ostringstream os;
  os << "family,param,k,observed,expected,agree\n";
  for (const auto& r : s.rows) {
    os << r.family << ',' << csv_number(r.param) << ',' << r.k << ',' << to_string(r.observed) << ','
       << (r.expected ? to_string(*r.expected) : "") << ',' << (r.agree ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string measure_csv(const DiscreteMeasure& mu) {
  std::ostringstream os;
  os << "lambda,w\n";
  for (std::size_t i = 0; i < mu.size(); ++i) os << csv_number(mu.lambdas[i]) << ',' << csv_number(mu.weights[i]) << '\n';
  return os.str();
}

std::string report_csv(const ToneReport& r) {
  std::ostringstream os;
  os << "function,interval,k,verdict,worst_margin,trials_run,decisive_trials,inconclusive_trials,min_eig\n";
  os << r.function << ',' << '"' << r.interval.to_string() << '"' << ',' << r.k << ',' << to_string(r.verdict) << ','
     << csv_number(r.worst_margin) << ',' << r.trials_run << ',' << r.decisive_trials << ',' << r.inconclusive_trials
     << ',' << (r.counterexample ? csv_number(r.counterexample->min_eig) : "") << '\n';
  return os.str();
}

SymMatrix parse_matrix_text(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::string normalized = text;
  for (char& c : normalized) {
    if (c == ';') c = '\n';
  }
  std::istringstream lines(normalized);
  std::string line;
  while (std::getline(lines, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (char& c : line) {
      if (c == ',' || c == '[' || c == ']') c = ' ';
    }
    std::istringstream cells(line);
    std::vector<double> row;
    std::string cell;
    while (cells >> cell) {
      try {
        std::size_t used = 0;
        double v = std::stod(cell, &used);
        if (used != cell.size()) throw ParseError("bad matrix entry '" + cell + "'");
        row.push_back(v);
      } catch (const std::logic_error&) {
        throw ParseError("bad matrix entry '" + cell + "'");
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  const int n = static_cast<int>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n) throw ParseError("matrix is not square");
    for (int j = 0; j < n; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return SymMatrix(m);
}

std::string format_matrix_text(const SymMatrix& m) {
  std::ostringstream os;
  for (int i = 0; i < m.dim(); ++i) {
    for (int j = 0; j < m.dim(); ++j) os << (j ? " " : "") << format_number(m(i, j));
    os << '\n';
  }
  return os.str();
}

SymMatrix parse_matrix(const std::string& text) {
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad matrix JSON: ") + e.what());
    }
    return matrix_from_json(j);
  }
  if (first != std::string::npos && text[first] == '[' && text.find("[[") != std::string::npos) {
    try {
      return matrix_from_json(Json::parse(text));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad matrix JSON: ") + e.what());
    }
  }
  return parse_matrix_text(text);
}

}  // namespace ktone
