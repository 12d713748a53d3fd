#include "ktone/ktone.h"

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "ktone/catalog.hpp"
#include "ktone/classify.hpp"
#include "ktone/deriv.hpp"
#include "ktone/divdiff.hpp"
#include "ktone/errors.hpp"
#include "ktone/measure.hpp"
#include "ktone/serialize.hpp"
#include "ktone/tonecheck.hpp"

struct ktone_function {
  ktone::CatalogEntry entry;
};

struct ktone_matrix {
  ktone::SymMatrix m;
};

struct ktone_result {
  ktone_verdict verdict = KTONE_PASS;
  std::string kind;
  ktone::Json body;
  ktone::Json provenance;
  std::string csv;
  std::optional<ktone_matrix> matrix;
  double min_eig = std::numeric_limits<double>::quiet_NaN();
  mutable std::string json_cache;
};

namespace {

using namespace ktone;

thread_local std::string g_last_error;

ktone_status status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::contract: return KTONE_E_CONTRACT;
    case ErrorKind::domain: return KTONE_E_DOMAIN;
    case ErrorKind::capability: return KTONE_E_CAPABILITY;
    case ErrorKind::numerical: return KTONE_E_NUMERICAL;
    case ErrorKind::config: return KTONE_E_CONFIG;
    case ErrorKind::parse: return KTONE_E_PARSE;
    case ErrorKind::unknown_function: return KTONE_E_UNKNOWN_FUNCTION;
  }
  return KTONE_E_INTERNAL;
}

template <class Fn>
ktone_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return KTONE_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return KTONE_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return KTONE_E_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw ContractViolation(std::string(what) + " must not be null");
}

Interval to_interval(const ktone_interval* iv) {
  require(iv, "interval");
  Interval out;
  out.lo = iv->lo;
  out.hi = iv->hi;
  out.margin = iv->margin;
  out.cap = iv->cap;
  out.validate();
  return out;
}

ktone_interval from_interval(const Interval& iv) { return ktone_interval{iv.lo, iv.hi, iv.margin, iv.cap}; }

CheckOptions to_options(const ktone_check_options* o) {
  require(o, "options");
  CheckOptions out;
  out.k = o->k;
  if (o->n_dims > 0) {
    require(o->dims, "dims");
    out.dims.assign(o->dims, o->dims + o->n_dims);
  }
  out.trials = o->trials;
  out.partitions_per_trial = o->partitions_per_trial;
  out.seed = o->seed;
  out.tol = o->tol;
  out.threads = o->threads;
  out.symmetric_directions = o->symmetric_directions != 0;
  if (o->n_alphas > 0) {
    require(o->alphas, "alphas");
    out.alphas.assign(o->alphas, o->alphas + o->n_alphas);
  }
  return out;
}

ktone_verdict to_c(Verdict v) {
  switch (v) {
    case Verdict::pass: return KTONE_PASS;
    case Verdict::refuted: return KTONE_REFUTED;
    case Verdict::inconclusive: return KTONE_INCONCLUSIVE;
  }
  return KTONE_INCONCLUSIVE;
}

Json interval_json(const Interval& iv) { return to_json(iv); }

Json check_provenance(const CheckOptions& o, const Interval& iv, const std::string& criterion) {
  return Json{{"criterion", criterion},   {"k", o.k},
              {"dims", o.dims},           {"trials", o.trials},
              {"partitions_per_trial", o.partitions_per_trial},
              {"seed", o.seed},           {"tol", o.tol},
              {"interval", interval_json(iv)}, {"symmetric_directions", o.symmetric_directions}};
}

const char* criterion_name(ktone_criterion c) {
  switch (c) {
    case KTONE_CRITERION_DEFINITION: return "definition";
    case KTONE_CRITERION_DERIVATIVE: return "derivative";
    case KTONE_CRITERION_REMAINDER: return "remainder";
    case KTONE_CRITERION_CHAIN: return "chain";
    case KTONE_CRITERION_CONE_CHAIN: return "cone_chain";
    case KTONE_CRITERION_PROFILE: return "profile";
  }
  return "unknown";
}

void finish_report(ktone_result& r, const ToneReport& rep) {
  r.verdict = to_c(rep.verdict);
  r.body = to_json(rep);
  r.csv = report_csv(rep);
  if (rep.counterexample) r.min_eig = rep.counterexample->min_eig;
}

std::string row_csv(const std::string& header, const std::string& row) { return header + "\n" + row + "\n"; }

}  // namespace

extern "C" {

const char* ktone_version(void) { return ktone::kVersion; }

const char* ktone_last_error(void) { return g_last_error.c_str(); }

const char* ktone_status_name(ktone_status s) {
  switch (s) {
    case KTONE_OK: return "ok";
    case KTONE_E_CONTRACT: return "contract_violation";
    case KTONE_E_DOMAIN: return "domain_error";
    case KTONE_E_CAPABILITY: return "capability_error";
    case KTONE_E_NUMERICAL: return "numerical_failure";
    case KTONE_E_CONFIG: return "config_error";
    case KTONE_E_PARSE: return "parse_error";
    case KTONE_E_UNKNOWN_FUNCTION: return "unknown_function";
    case KTONE_E_INTERNAL: return "internal_error";
  }
  return "internal_error";
}

ktone_status ktone_function_create(const char* name, ktone_function** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = new ktone_function{parse_function(name)};
  });
}

ktone_status ktone_function_negate(const ktone_function* f, ktone_function** out) {
  return guarded([&] {
    require(f, "function");
    require(out, "out");
    *out = new ktone_function{negate_entry(f->entry)};
  });
}

void ktone_function_destroy(ktone_function* f) { delete f; }

const char* ktone_function_name(const ktone_function* f) { return f ? f->entry.name().c_str() : ""; }

ktone_status ktone_function_interval(const ktone_function* f, ktone_interval* out) {
  return guarded([&] {
    require(f, "function");
    require(out, "out");
    *out = from_interval(parse_interval(f->entry.table_interval));
  });
}

ktone_status ktone_function_deriv(const ktone_function* f, int order, double x, double* out) {
  return guarded([&] {
    require(f, "function");
    require(out, "out");
    *out = f->entry.function.deriv(order, x);
  });
}

ktone_status ktone_function_expected(const ktone_function* f, int k, const char** out) {
  return guarded([&] {
    require(f, "function");
    require(out, "out");
    switch (expected_tonicity(f->entry, k)) {
      case Tonicity::plus: *out = "plus"; break;
      case Tonicity::minus: *out = "minus"; break;
      case Tonicity::both: *out = "both"; break;
      case Tonicity::neither: *out = "neither"; break;
    }
  });
}

ktone_status ktone_interval_parse(const char* text, ktone_interval* out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = from_interval(parse_interval(text));
  });
}

ktone_status ktone_matrix_create(int dim, const double* row_major, ktone_matrix** out) {
  return guarded([&] {
    require(out, "out");
    if (dim < 1) throw ContractViolation("matrix dimension must be positive");
    require(row_major, "data");
    Eigen::MatrixXd m(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) m(i, j) = row_major[i * dim + j];
    }
    *out = new ktone_matrix{SymMatrix(m)};
  });
}

ktone_status ktone_matrix_parse(const char* text, ktone_matrix** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new ktone_matrix{parse_matrix(text)};
  });
}

int ktone_matrix_dim(const ktone_matrix* m) { return m ? m->m.dim() : 0; }

ktone_status ktone_matrix_copy(const ktone_matrix* m, double* row_major, size_t len) {
  return guarded([&] {
    require(m, "matrix");
    require(row_major, "buffer");
    const int n = m->m.dim();
    if (len < static_cast<size_t>(n) * static_cast<size_t>(n)) throw ContractViolation("buffer too small");
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) row_major[i * n + j] = m->m(i, j);
    }
  });
}

void ktone_matrix_destroy(ktone_matrix* m) { delete m; }

ktone_status ktone_random_ordered_pair(const ktone_interval* iv, int dim, uint64_t seed, ktone_matrix** a,
                                       ktone_matrix** b) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    auto [ma, mb] = random_ordered_pair(to_interval(iv), dim, seed);
    auto pa = std::make_unique<ktone_matrix>(ktone_matrix{ma});
    *b = new ktone_matrix{mb};
    *a = pa.release();
  });
}

ktone_status ktone_random_in_window(const ktone_interval* iv, int dim, uint64_t seed, ktone_matrix** out) {
  return guarded([&] {
    require(out, "out");
    *out = new ktone_matrix{random_in_window(to_interval(iv), dim, seed)};
  });
}

ktone_status ktone_random_symmetric(int dim, uint64_t seed, double scale, ktone_matrix** out) {
  return guarded([&] {
    require(out, "out");
    *out = new ktone_matrix{random_symmetric(dim, seed, scale)};
  });
}

void ktone_check_options_init(ktone_check_options* opts) {
  if (!opts) return;
  static const int kDims[] = {1, 2, 3, 4, 5};
  CheckOptions d;
  opts->k = d.k;
  opts->dims = kDims;
  opts->n_dims = 5;
  opts->trials = d.trials;
  opts->partitions_per_trial = d.partitions_per_trial;
  opts->seed = d.seed;
  opts->tol = d.tol;
  opts->threads = d.threads;
  opts->symmetric_directions = 0;
  opts->alphas = nullptr;
  opts->n_alphas = 0;
  opts->lmax = 1;
  opts->chain_alpha = std::numeric_limits<double>::quiet_NaN();
  opts->chain_grid = 10;
  opts->profile_order = 4;
}

void ktone_fit_options_init(ktone_fit_options* opts) {
  if (!opts) return;
  FitOptions d;
  opts->grid_size = 0;
  opts->lambda_max = d.lambda_max;
  opts->tuples = d.tuples;
  opts->confluent_fraction = d.confluent_fraction;
  opts->seed = d.seed;
  opts->tikhonov = d.tikhonov;
  opts->tol = d.tol;
  opts->threads = d.threads;
}

ktone_status ktone_check(const ktone_function* f, const ktone_interval* iv, ktone_criterion criterion,
                         const ktone_check_options* opts, ktone_result** out) {
  return guarded([&] {
    require(f, "function");
    require(out, "out");
    Interval interval = to_interval(iv);
    CheckOptions o = to_options(opts);
    const ScalarFunction& fn = f->entry.function;
    auto r = std::make_unique<ktone_result>();
    r->kind = criterion_name(criterion);
    r->provenance = check_provenance(o, interval, r->kind);
    switch (criterion) {
      case KTONE_CRITERION_DEFINITION: finish_report(*r, check_definition(fn, interval, o)); break;
      case KTONE_CRITERION_DERIVATIVE: finish_report(*r, check_derivative(fn, interval, o)); break;
      case KTONE_CRITERION_REMAINDER: finish_report(*r, check_remainder_monotone(fn, interval, o)); break;
      case KTONE_CRITERION_CHAIN:
        r->provenance["grid"] = opts->chain_grid;
        finish_report(*r, check_chain_inequality(fn, interval, o, opts->chain_grid));
        break;
      case KTONE_CRITERION_CONE_CHAIN: {
        std::optional<double> alpha;
        if (!std::isnan(opts->chain_alpha)) alpha = opts->chain_alpha;
        ConeChainReport rep = check_cone_chain(fn, interval, opts->lmax, o, alpha);
        r->provenance["lmax"] = opts->lmax;
        r->body = to_json(rep);
        bool undecided = false;
        std::string rows;
        for (const auto& it : rep.items) {
          undecided = undecided || it.report.verdict == Verdict::inconclusive;
          rows += it.rule + "," + it.function + "," + std::to_string(it.k) + "," + to_string(it.report.verdict) + "\n";
        }
        r->verdict = !rep.consistent ? KTONE_REFUTED : (undecided ? KTONE_INCONCLUSIVE : KTONE_PASS);
        r->csv = "rule,function,k,verdict\n" + rows;
        break;
      }
      case KTONE_CRITERION_PROFILE: {
        MonotonicityProfile p = monotonicity_profile(fn, interval, opts->profile_order, o);
        r->provenance["profile_order"] = opts->profile_order;
        r->body = to_json(p);
        r->verdict = p.consistent ? KTONE_PASS : KTONE_REFUTED;
        std::string rows;
        for (const auto& row : p.rows) {
          rows += std::to_string(row.order) + "," + to_string(row.plus) + "," + to_string(row.minus) + "\n";
        }
        r->csv = "order,plus,minus\n" + rows;
        break;
      }
      default: throw ConfigError("unknown criterion");
    }
    *out = r.release();
  });
}

ktone_status ktone_replay(const char* report_json, double match_tol, ktone_result** out) {
  return guarded([&] {
    require(report_json, "report");
    require(out, "out");
    Json j;
    try {
      j = Json::parse(report_json);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("report is not valid JSON: ") + e.what());
    }
    ToneReport rep = report_from_json(j);
    ReplayResult rr = replay(rep, match_tol);
    auto r = std::make_unique<ktone_result>();
    r->kind = "replay";
    r->provenance = Json{{"function", rep.function}, {"tol", rep.tol}, {"match_tol", match_tol}, {"seed", rep.seed}};
    r->body = to_json(rr);
    r->body["function"] = rep.function;
    r->verdict = rr.reproduced ? KTONE_REFUTED : KTONE_INCONCLUSIVE;
    r->min_eig = rr.replayed_min_eig;
    r->csv = row_csv("function,reproduced,stored_min_eig,replayed_min_eig",
                     rep.function + "," + (rr.reproduced ? "true" : "false") + "," +
                         format_number(rr.stored_min_eig) + "," + format_number(rr.replayed_min_eig));
    *out = r.release();
  });
}

ktone_status ktone_sweep(const char* family, const double* params, int n_params, int kmin, int kmax,
                         const ktone_interval* iv, const ktone_check_options* opts, ktone_result** out) {
  return guarded([&] {
    require(family, "family");
    require(out, "out");
    if (n_params > 0) require(params, "params");
    std::vector<double> ps(params, params + std::max(n_params, 0));
    CheckOptions o = to_options(opts);
    std::optional<Interval> interval;
    if (iv) interval = to_interval(iv);
    SweepResult s = run_sweep(family, ps, kmin, kmax, o, interval);
    auto r = std::make_unique<ktone_result>();
    r->kind = "sweep";
    r->provenance = Json{{"family", family}, {"kmin", kmin},      {"kmax", kmax},  {"dims", o.dims},
                         {"trials", o.trials}, {"seed", o.seed}, {"tol", o.tol},
                         {"partitions_per_trial", o.partitions_per_trial}};
    if (interval) r->provenance["interval"] = to_json(*interval);
    r->body = to_json(s);
    r->csv = sweep_csv(s);
    r->verdict = s.disagreements == 0 ? KTONE_PASS : KTONE_REFUTED;
    *out = r.release();
  });
}

ktone_status ktone_fit(const ktone_function* f, int k, const ktone_interval* iv, const ktone_fit_options* opts,
                       ktone_result** out) {
  return guarded([&] {
    require(f, "function");
    require(opts, "options");
    require(out, "out");
    Interval interval = to_interval(iv);
    const ScalarFunction& fn = f->entry.function;
    FitOptions o;
    o.lambda_max = opts->lambda_max;
    o.tuples = opts->tuples;
    o.confluent_fraction = opts->confluent_fraction;
    o.seed = opts->seed;
    o.tikhonov = opts->tikhonov;
    o.tol = opts->tol;
    o.threads = opts->threads;
    bool unit = interval.lo == -1.0 && interval.hi == 1.0;
    bool half = interval.lo == 0.0 && !interval.hi_finite();
    if (!unit && !half) throw ConfigError("fits are defined on (-1,1) and (0,inf) only");
    o.grid_size = opts->grid_size > 0 ? opts->grid_size : (unit ? 201 : 301);
    FitResult fit = unit ? fit_measure_m11(fn, k, o) : fit_measure_0inf(fn, k, o);
    auto r = std::make_unique<ktone_result>();
    r->kind = "fit";
    r->provenance = Json{{"k", k},
                         {"interval", to_json(interval)},
                         {"grid", fit.grid},
                         {"tuples", o.tuples},
                         {"seed", o.seed},
                         {"tikhonov", o.tikhonov},
                         {"tol", o.tol}};
    r->body = to_json(fit);
    r->body["classification"] = to_json(classify_support(fit.measure, k, o.tol));
    if (unit) {
      double fact = 1.0;
      for (int i = 2; i <= k; ++i) fact *= i;
      r->body["mass_identity"] = Json{{"expected", fn.deriv(k, 0.0) / fact}, {"total_mass", fit.measure.total_mass()}};
    } else {
      r->body["limits"] = to_json(limit_diagnostics(fn, k, fit.measure.gamma, o.lambda_max));
    }
    r->csv = measure_csv(fit.measure);
    r->verdict = fit.ok ? KTONE_PASS : KTONE_REFUTED;
    *out = r.release();
  });
}

ktone_status ktone_deriv(const ktone_function* f, const ktone_matrix* a, const ktone_matrix* x, int k,
                         ktone_deriv_method method, ktone_result** out) {
  return guarded([&] {
    require(f, "function");
    require(a, "a");
    require(x, "x");
    require(out, "out");
    const ScalarFunction& fn = f->entry.function;
    auto r = std::make_unique<ktone_result>();
    r->kind = "deriv";
    r->body = Json{{"function", fn.name()}, {"k", k}, {"a", to_json(a->m)}, {"x", to_json(x->m)}};
    SymMatrix value;
    if (method == KTONE_DERIV_FINITE_DIFFERENCE) {
      FdResult fd = directional_derivative_fd_full(fn, a->m, x->m, k);
      value = fd.value;
      r->body["method"] = "finite_difference";
      r->body["h"] = fd.h;
      r->body["stencil"] = fd.stencil;
    } else {
      DkResult dk = directional_derivative_dk_full(fn, a->m, x->m, k);
      value = dk.value;
      r->body["method"] = "eigenbasis";
      r->body["magnitude"] = dk.magnitude;
    }
    r->body["value"] = to_json(value);
    r->provenance = Json{{"k", k}, {"method", r->body["method"]}};
    r->csv = format_matrix_text(value);
    r->matrix = ktone_matrix{value};
    *out = r.release();
  });
}

ktone_status ktone_divdiff(const ktone_function* f, const ktone_matrix* a, const ktone_matrix* b, const double* ts,
                           int n_ts, ktone_result** out) {
  return guarded([&] {
    require(f, "function");
    require(a, "a");
    require(b, "b");
    require(out, "out");
    if (n_ts < 1) throw ContractViolation("partition needs at least one point");
    require(ts, "ts");
    std::vector<double> part(ts, ts + n_ts);
    const ScalarFunction& fn = f->entry.function;
    MatrixDivDiff dd = matrix_divdiff_full(fn, a->m, b->m, part);
    auto r = std::make_unique<ktone_result>();
    r->kind = "divdiff";
    r->body = Json{{"function", fn.name()},
                   {"k", n_ts - 1},
                   {"a", to_json(a->m)},
                   {"b", to_json(b->m)},
                   {"partition", part},
                   {"value", to_json(dd.value)},
                   {"max_summand_norm", dd.max_summand_norm},
                   {"cancellation_dominated", dd.cancellation_dominated}};
    r->provenance = Json{{"k", n_ts - 1}, {"partition", part}};
    r->csv = format_matrix_text(dd.value);
    r->matrix = ktone_matrix{dd.value};
    *out = r.release();
  });
}

ktone_verdict ktone_result_verdict(const ktone_result* r) { return r ? r->verdict : KTONE_INCONCLUSIVE; }

const char* ktone_result_json(const ktone_result* r, int with_timestamp) {
  if (!r) return "";
  r->json_cache = envelope(r->kind, r->body, r->provenance, with_timestamp != 0).dump(2);
  return r->json_cache.c_str();
}

const char* ktone_result_csv(const ktone_result* r) { return r ? r->csv.c_str() : ""; }

const ktone_matrix* ktone_result_matrix(const ktone_result* r) {
  return r && r->matrix ? &*r->matrix : nullptr;
}

double ktone_result_min_eig(const ktone_result* r) {
  return r ? r->min_eig : std::numeric_limits<double>::quiet_NaN();
}

void ktone_result_destroy(ktone_result* r) { delete r; }

}  // extern "C"
