#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ktone/ktone.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitError = 1;
constexpr int kExitRefuted = 2;
constexpr int kExitInconclusive = 3;

struct Failure {
  std::string message;
};

void ok(ktone_status s) {
  if (s != KTONE_OK) throw Failure{std::string(ktone_status_name(s)) + ": " + ktone_last_error()};
}

struct FunctionDel {
  void operator()(ktone_function* f) const { ktone_function_destroy(f); }
};
struct MatrixDel {
  void operator()(ktone_matrix* m) const { ktone_matrix_destroy(m); }
};
struct ResultDel {
  void operator()(ktone_result* r) const { ktone_result_destroy(r); }
};
using FunctionPtr = std::unique_ptr<ktone_function, FunctionDel>;
using MatrixPtr = std::unique_ptr<ktone_matrix, MatrixDel>;
using ResultPtr = std::unique_ptr<ktone_result, ResultDel>;

FunctionPtr make_function(const std::string& name, bool negate) {
  ktone_function* f = nullptr;
  ok(ktone_function_create(name.c_str(), &f));
  FunctionPtr out(f);
  if (negate) {
    ktone_function* g = nullptr;
    ok(ktone_function_negate(out.get(), &g));
    out.reset(g);
  }
  return out;
}

ktone_interval interval_for(const ktone_function* f, const std::string& text) {
  ktone_interval iv{};
  if (text.empty()) {
    ok(ktone_function_interval(f, &iv));
  } else {
    ok(ktone_interval_parse(text.c_str(), &iv));
  }
  return iv;
}

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }
  std::ifstream in(path);
  if (!in) throw Failure{"cannot read '" + path + "'"};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

MatrixPtr read_matrix(const std::string& path) {
  ktone_matrix* m = nullptr;
  ok(ktone_matrix_parse(slurp(path).c_str(), &m));
  return MatrixPtr(m);
}

struct Output {
  std::string format = "json";
  std::string out;
  bool no_timestamp = false;

  void add(CLI::App* app) {
    app->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app->add_option("--out", out, "Write output to a file instead of stdout");
    app->add_flag("--no-timestamp", no_timestamp, "Omit the timestamp field");
  }

  void emit(const ktone_result* r) const {
    std::string text = format == "csv" ? ktone_result_csv(r) : std::string(ktone_result_json(r, !no_timestamp)) + "\n";
    write(text);
  }

  void write(const std::string& text) const {
    if (out.empty()) {
      std::cout << text;
      std::cout.flush();
      return;
    }
    std::ofstream f(out);
    if (!f) throw Failure{"cannot write '" + out + "'"};
    f << text;
  }
};

int exit_for(ktone_verdict v) {
  switch (v) {
    case KTONE_PASS: return kExitPass;
    case KTONE_REFUTED: return kExitRefuted;
    case KTONE_INCONCLUSIVE: return kExitInconclusive;
  }
  return kExitError;
}

struct CheckFlags {
  int k = 1;
  std::vector<int> dims{1, 2, 3, 4, 5};
  int trials = 200;
  int partitions = 4;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  int threads = 1;
  bool symmetric = false;
  std::vector<double> alphas;
  CLI::Option* tol_opt = nullptr;
  CLI::Option* threads_opt = nullptr;

  void add(CLI::App* app) {
    app->add_option("--k", k, "Order")->check(CLI::PositiveNumber);
    app->add_option("--dims", dims, "Matrix dimensions")->delimiter(',');
    app->add_option("--trials", trials, "Trials per dimension")->check(CLI::NonNegativeNumber);
    app->add_option("--partitions", partitions, "Partitions per trial")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "Base seed");
    tol_opt = app->add_option("--tol", tol, "Relative PSD tolerance");
    threads_opt = app->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    app->add_flag("--symmetric-directions", symmetric, "Derivative check with symmetric directions (even k)");
    app->add_option("--alphas", alphas, "Remainder base points")->delimiter(',');
  }

  void apply_env() {
    if (tol_opt && tol_opt->count() == 0) {
      if (const char* v = std::getenv("KTONE_TOL")) tol = parse_env_double("KTONE_TOL", v);
    }
    if (threads_opt && threads_opt->count() == 0) {
      if (const char* v = std::getenv("KTONE_THREADS")) threads = static_cast<int>(parse_env_double("KTONE_THREADS", v));
    }
  }

  static double parse_env_double(const char* name, const char* v) {
    try {
      std::size_t used = 0;
      double d = std::stod(v, &used);
      if (used != std::string(v).size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw Failure{std::string("bad value for ") + name + ": '" + v + "'"};
    }
  }

  ktone_check_options options() const {
    ktone_check_options o;
    ktone_check_options_init(&o);
    o.k = k;
    o.dims = dims.data();
    o.n_dims = static_cast<int>(dims.size());
    o.trials = trials;
    o.partitions_per_trial = partitions;
    o.seed = seed;
    o.tol = tol;
    o.threads = threads;
    o.symmetric_directions = symmetric ? 1 : 0;
    o.alphas = alphas.empty() ? nullptr : alphas.data();
    o.n_alphas = static_cast<int>(alphas.size());
    return o;
  }
};

ktone_criterion parse_criterion(const std::string& s) {
  if (s == "definition") return KTONE_CRITERION_DEFINITION;
  if (s == "derivative") return KTONE_CRITERION_DERIVATIVE;
  if (s == "remainder") return KTONE_CRITERION_REMAINDER;
  if (s == "chain") return KTONE_CRITERION_CHAIN;
  if (s == "cone-chain") return KTONE_CRITERION_CONE_CHAIN;
  return KTONE_CRITERION_PROFILE;
}

int replay_one(const std::string& report, double match_tol, std::vector<nlohmann::json>& rows, bool& all) {
  ktone_result* r = nullptr;
  ok(ktone_replay(report.c_str(), match_tol, &r));
  ResultPtr res(r);
  auto j = nlohmann::json::parse(ktone_result_json(res.get(), 0));
  rows.push_back(j["data"]);
  bool reproduced = ktone_result_verdict(res.get()) == KTONE_REFUTED;
  all = all && reproduced;
  return reproduced ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operator k-tonicity checks, divided differences and representing-measure fits"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ktone_version()));

  std::string fn, interval, criterion = "definition";
  bool negate = false;
  CheckFlags flags;
  Output output;
  int lmax = 1, grid = 10, order = 4;
  double alpha = std::nan("");

  auto* check = app.add_subcommand("check", "Run a tonicity check");
  check->add_option("--fn", fn, "Catalog function name")->required();
  check->add_option("--interval", interval, "Interval, e.g. 0,inf or -1,1");
  check->add_flag("--negate", negate, "Check -f");
  check->add_option("--criterion", criterion, "Criterion")
      ->check(CLI::IsMember({"definition", "derivative", "remainder", "chain", "cone-chain", "profile"}));
  check->add_option("--lmax", lmax, "Cone chain depth")->check(CLI::PositiveNumber);
  check->add_option("--alpha", alpha, "Cone chain shift point");
  check->add_option("--grid", grid, "Chain inequality (s,t) grid size")->check(CLI::PositiveNumber);
  check->add_option("--order", order, "Monotonicity profile order")->check(CLI::NonNegativeNumber);
  flags.add(check);
  output.add(check);

  std::string family;
  std::vector<std::string> param_text;
  int kmin = 1, kmax = 4;
  auto* sweep = app.add_subcommand("sweep", "Classify a catalog family over a parameter grid");
  sweep->add_option("--family", family, "Family name, e.g. power")->required();
  sweep->add_option("--params", param_text, "Parameter grid; empty for none")->delimiter(',');
  sweep->add_option("--kmin", kmin, "Smallest order")->check(CLI::PositiveNumber);
  sweep->add_option("--kmax", kmax, "Largest order")->check(CLI::PositiveNumber);
  sweep->add_option("--interval", interval, "Override the table interval");
  CheckFlags sweep_flags;
  sweep_flags.add(sweep);
  output.add(sweep);

  int fit_k = 1, grid_size = 0, tuples = 400;
  double lambda_max = 1e3, fit_tol = 1e-3, tikhonov = 1e-10;
  std::uint64_t fit_seed = 0;
  auto* fit = app.add_subcommand("fit", "Fit the representing measure");
  fit->add_option("--fn", fn, "Catalog function name")->required();
  fit->add_option("--interval", interval, "(-1,1) or (0,inf)");
  fit->add_flag("--negate", negate, "Fit -f");
  fit->add_option("--k", fit_k, "Order")->check(CLI::PositiveNumber);
  fit->add_option("--grid-size", grid_size, "Number of grid atoms");
  fit->add_option("--lambda-max", lambda_max, "Largest atom on the half line");
  fit->add_option("--tuples", tuples, "Number of sample tuples")->check(CLI::PositiveNumber);
  fit->add_option("--seed", fit_seed, "Seed for tuple sampling");
  fit->add_option("--tol", fit_tol, "Residual tolerance");
  fit->add_option("--tikhonov", tikhonov, "Regularization weight");
  output.add(fit);

  int dk = 1, dim = 3;
  std::uint64_t seed = 0;
  std::string a_path, b_path, x_path, method = "eigenbasis";
  std::vector<double> ts;
  auto* deriv = app.add_subcommand("deriv", "Directional derivative d^k/dt^k f(A+tX) at 0");
  deriv->add_option("--fn", fn, "Catalog function name")->required();
  deriv->add_option("--interval", interval, "Sampling interval for A");
  deriv->add_flag("--negate", negate, "Use -f");
  deriv->add_option("--k", dk, "Order")->check(CLI::PositiveNumber);
  deriv->add_option("--dim", dim, "Dimension of random inputs")->check(CLI::PositiveNumber);
  deriv->add_option("--seed", seed, "Seed for random inputs");
  deriv->add_option("--a", a_path, "File with A");
  deriv->add_option("--x", x_path, "File with X");
  deriv->add_option("--method", method, "eigenbasis or fd")->check(CLI::IsMember({"eigenbasis", "fd"}));
  output.add(deriv);

  auto* divdiff = app.add_subcommand("divdiff", "Operator divided difference along the segment A to B");
  divdiff->add_option("--fn", fn, "Catalog function name")->required();
  divdiff->add_option("--interval", interval, "Sampling interval for A <= B");
  divdiff->add_flag("--negate", negate, "Use -f");
  divdiff->add_option("--k", dk, "Order")->check(CLI::PositiveNumber);
  divdiff->add_option("--dim", dim, "Dimension of random inputs")->check(CLI::PositiveNumber);
  divdiff->add_option("--seed", seed, "Seed for random inputs");
  divdiff->add_option("--a", a_path, "File with A");
  divdiff->add_option("--b", b_path, "File with B");
  divdiff->add_option("--ts", ts, "Partition points in [0,1]")->delimiter(',');
  output.add(divdiff);

  std::string in_path;
  double match_tol = 1e-12;
  auto* report = app.add_subcommand("report", "Replay the counterexamples stored in a JSON report");
  report->add_option("input", in_path, "Report file ('-' for stdin)")->required();
  report->add_option("--match-tol", match_tol, "Allowed eigenvalue drift");
  output.add(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitError;
  }

  try {
    if (*check) {
      flags.apply_env();
      auto f = make_function(fn, negate);
      ktone_interval iv = interval_for(f.get(), interval);
      ktone_check_options o = flags.options();
      o.lmax = lmax;
      o.chain_alpha = alpha;
      o.chain_grid = grid;
      o.profile_order = order;
      ktone_result* r = nullptr;
      ok(ktone_check(f.get(), &iv, parse_criterion(criterion), &o, &r));
      ResultPtr res(r);
      output.emit(res.get());
      return exit_for(ktone_result_verdict(res.get()));
    }
    if (*sweep) {
      sweep_flags.apply_env();
      ktone_check_options o = sweep_flags.options();
      ktone_interval iv{};
      if (!interval.empty()) ok(ktone_interval_parse(interval.c_str(), &iv));
      std::vector<double> params;
      for (const auto& t : param_text) {
        if (t.empty()) continue;
        try {
          std::size_t used = 0;
          params.push_back(std::stod(t, &used));
          if (used != t.size()) throw std::invalid_argument(t);
        } catch (const std::exception&) {
          throw Failure{"bad parameter '" + t + "' in --params"};
        }
      }
      ktone_result* r = nullptr;
      ok(ktone_sweep(family.c_str(), params.empty() ? nullptr : params.data(), static_cast<int>(params.size()), kmin,
                     kmax, interval.empty() ? nullptr : &iv, &o, &r));
      ResultPtr res(r);
      output.emit(res.get());
      return exit_for(ktone_result_verdict(res.get()));
    }
    if (*fit) {
      auto f = make_function(fn, negate);
      ktone_interval iv = interval_for(f.get(), interval);
      ktone_fit_options o;
      ktone_fit_options_init(&o);
      o.grid_size = grid_size;
      o.lambda_max = lambda_max;
      o.tuples = tuples;
      o.seed = fit_seed;
      o.tol = fit_tol;
      o.tikhonov = tikhonov;
      ktone_result* r = nullptr;
      ok(ktone_fit(f.get(), fit_k, &iv, &o, &r));
      ResultPtr res(r);
      output.emit(res.get());
      return ktone_result_verdict(res.get()) == KTONE_PASS ? kExitPass : kExitRefuted;
    }
    if (*deriv) {
      auto f = make_function(fn, negate);
      ktone_interval iv = interval_for(f.get(), interval);
      MatrixPtr a, x;
      if (!a_path.empty()) {
        a = read_matrix(a_path);
      } else {
        ktone_matrix* m = nullptr;
        ok(ktone_random_in_window(&iv, dim, seed, &m));
        a.reset(m);
      }
      if (!x_path.empty()) {
        x = read_matrix(x_path);
      } else {
        ktone_matrix* m = nullptr;
        ok(ktone_random_symmetric(ktone_matrix_dim(a.get()), seed + 1, 1.0, &m));
        x.reset(m);
      }
      ktone_result* r = nullptr;
      ok(ktone_deriv(f.get(), a.get(), x.get(), dk,
                     method == "fd" ? KTONE_DERIV_FINITE_DIFFERENCE : KTONE_DERIV_EIGENBASIS, &r));
      ResultPtr res(r);
      output.emit(res.get());
      return kExitPass;
    }
    if (*divdiff) {
      auto f = make_function(fn, negate);
      ktone_interval iv = interval_for(f.get(), interval);
      MatrixPtr a, b;
      if (!a_path.empty() || !b_path.empty()) {
        if (a_path.empty() || b_path.empty()) throw Failure{"--a and --b must be given together"};
        a = read_matrix(a_path);
        b = read_matrix(b_path);
      } else {
        ktone_matrix* ma = nullptr;
        ktone_matrix* mb = nullptr;
        ok(ktone_random_ordered_pair(&iv, dim, seed, &ma, &mb));
        a.reset(ma);
        b.reset(mb);
      }
      if (ts.empty()) {
        for (int i = 0; i <= dk; ++i) ts.push_back(static_cast<double>(i) / dk);
      }
      ktone_result* r = nullptr;
      ok(ktone_divdiff(f.get(), a.get(), b.get(), ts.data(), static_cast<int>(ts.size()), &r));
      ResultPtr res(r);
      output.emit(res.get());
      return kExitPass;
    }
    if (*report) {
      std::string text = slurp(in_path);
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(text);
      } catch (const nlohmann::json::exception& e) {
        throw Failure{std::string("parse_error: ") + e.what()};
      }
      std::vector<nlohmann::json> rows;
      bool all = true;
      int stored = 0;
      const auto& data = doc.contains("data") ? doc["data"] : doc;
      if (doc.value("kind", "") == "sweep") {
        for (const auto& row : data.at("rows")) {
          for (const char* key : {"refutation", "negated_refutation"}) {
            if (row.contains(key) && !row[key]["counterexample"].is_null()) {
              ++stored;
              replay_one(row[key].dump(), match_tol, rows, all);
            }
          }
        }
      } else if (data.contains("counterexample") && !data["counterexample"].is_null()) {
        ++stored;
        replay_one(text, match_tol, rows, all);
      }
      nlohmann::json out{{"schema_version", "ktone.report/1"},
                         {"kind", "replay"},
                         {"library", {{"name", "ktone"}, {"version", ktone_version()}}},
                         {"data", {{"counterexamples", stored}, {"all_reproduced", all}, {"replays", rows}}}};
      if (output.format == "csv") {
        std::string csv = "index,reproduced,stored_min_eig,replayed_min_eig\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
          std::ostringstream line;
          line.precision(17);
          line << i << ',' << (rows[i]["reproduced"].get<bool>() ? "true" : "false") << ','
               << rows[i]["stored_min_eig"].dump() << ',' << rows[i]["replayed_min_eig"].dump() << '\n';
          csv += line.str();
        }
        output.write(csv);
      } else {
        output.write(out.dump(2) + "\n");
      }
      return all ? kExitPass : kExitInconclusive;
    }
  } catch (const Failure& e) {
    std::cerr << "error: " << e.message << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
