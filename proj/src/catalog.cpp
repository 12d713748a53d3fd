#include "ktone/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "ktone/errors.hpp"

namespace ktone {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kIntTol = 1e-12;

bool is_integer(double p) { return std::abs(p - std::nearbyint(p)) <= kIntTol; }

double binom(int n, int r) {
  if (r < 0 || r > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= r; ++i) c = c * (n - r + i) / i;
  return c;
}

double fact(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

double ipow(double x, int e) {
  double r = 1.0;
  double b = x;
  unsigned u = static_cast<unsigned>(e < 0 ? -e : e);
  while (u) {
    if (u & 1u) r *= b;
    b *= b;
    u >>= 1u;
  }
  return e < 0 ? 1.0 / r : r;
}

/// x^q for real q; integer exponents also work for negative x.
double rpow(double x, double q) {
  if (is_integer(q)) return ipow(x, static_cast<int>(std::nearbyint(q)));
  return std::pow(x, q);
}

double power_deriv(double p, int m, double x) {
  double c = falling_factorial(p, m);
  if (c == 0.0) return 0.0;
  return c * rpow(x, p - m);
}

double log_deriv(int m, double x) {
  if (m == 0) return std::log(x);
  double sign = (m % 2 == 1) ? 1.0 : -1.0;
  return sign * fact(m - 1) / ipow(x, m);
}

/// d/dp of the falling factorial.
double falling_factorial_dp(double p, int m) {
  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    double prod = 1.0;
    for (int j = 0; j < m; ++j) {
      if (j != i) prod *= p - j;
    }
    s += prod;
  }
  return s;
}

double power_log_deriv(double p, int m, double x) {
  return rpow(x, p - m) * (falling_factorial(p, m) * std::log(x) + falling_factorial_dp(p, m));
}

/// m-th derivative of x^p g(x) by the Leibniz rule, given g's derivatives.
double leibniz_power(double p, int m, double x, double (*g)(int, double)) {
  std::vector<double> ff(m + 1);  // p (p-1) ... (p-r+1)
  ff[0] = 1.0;
  for (int r = 1; r <= m; ++r) ff[r] = ff[r - 1] * (p - r + 1);
  const double inv = 1.0 / x;
  double xr = rpow(x, p);  // x^(p - m + j)
  for (int r = 0; r < m; ++r) xr *= inv;
  double s = 0.0;
  double c = 1.0;  // C(m, j)
  for (int j = 0; j <= m; ++j) {
    if (ff[m - j] != 0.0) s += c * ff[m - j] * xr * g(j, x);
    c = c * (m - j) / (j + 1);
    xr *= x;
  }
  return s;
}

double recip_deriv(int j, double x) {
  // d^j/dx^j 1/(x+1)
  double sign = (j % 2) ? -1.0 : 1.0;
  return sign * fact(j) / ipow(x + 1.0, j + 1);
}

// ---- (x-1)/log x

constexpr int kGregoryTerms = 420;

const std::vector<long double>& gregory() {
  // Taylor coefficients of u / log(1+u)
  static const std::vector<long double> g = [] {
    std::vector<long double> ell(kGregoryTerms + 1);
    for (int i = 0; i <= kGregoryTerms; ++i) ell[i] = ((i % 2) ? -1.0L : 1.0L) / (i + 1);
    std::vector<long double> out(kGregoryTerms + 1, 0.0L);
    out[0] = 1.0L;
    for (int j = 1; j <= kGregoryTerms; ++j) {
      long double s = 0.0L;
      for (int i = 1; i <= j; ++i) s += ell[i] * out[j - i];
      out[j] = -s;
    }
    return out;
  }();
  return g;
}

/// Taylor coefficients of orders 0..top of (x-1)/log x at x.
std::vector<double> logmean_coeffs(double x, int top) {
  std::vector<double> out(top + 1);
  double u = x - 1.0;
  if (std::abs(u) < 0.5) {
    // coefficient n is sum_j g_j C(j, n) u^(j-n)
    const auto& g = gregory();
    std::vector<long double> acc(top + 1, 0.0L);
    std::vector<long double> c(top + 1, 0.0L);  // C(j, n) u^(j-n)
    c[0] = 1.0L;
    const long double lu = u;
    for (int j = 0; j <= kGregoryTerms; ++j) {
      if (j > 0) {
        for (int n = std::min(j, top); n >= 1; --n) c[n] = c[n] * lu + c[n - 1];
        c[0] *= lu;
      }
      long double biggest = 0.0L;
      for (int n = 0; n <= std::min(j, top); ++n) {
        acc[n] += g[j] * c[n];
        biggest = std::max(biggest, std::abs(c[n]) / (1.0L + std::abs(acc[n])));
      }
      if (j > top + 30 && biggest < 1e-22L) break;
    }
    for (int n = 0; n <= top; ++n) out[n] = static_cast<double>(acc[n]);
    return out;
  }
  // reciprocal series of log about x, then multiply by (x - 1)
  std::vector<long double> lcoef(top + 1), h(top + 1);
  long double lx = x;
  lcoef[0] = std::log(lx);
  long double lpow = 1.0L;
  for (int i = 1; i <= top; ++i) {
    lpow *= lx;
    lcoef[i] = ((i % 2) ? 1.0L : -1.0L) / (i * lpow);
  }
  h[0] = 1.0L / lcoef[0];
  for (int i = 1; i <= top; ++i) {
    long double s = 0.0L;
    for (int q = 1; q <= i; ++q) s += lcoef[q] * h[i - q];
    h[i] = -s / lcoef[0];
  }
  long double um = lx - 1.0L;
  out[0] = static_cast<double>(um * h[0]);
  for (int n = 1; n <= top; ++n) out[n] = static_cast<double>(um * h[n] + h[n - 1]);
  return out;
}

double logmean_coeff(int n, double x) {
  thread_local double last_x = std::numeric_limits<double>::quiet_NaN();
  thread_local std::vector<double> last;
  if (!(x == last_x) || n >= static_cast<int>(last.size())) {
    // low orders alone are cheap; anything beyond them is likely followed by the rest
    last = logmean_coeffs(x, n <= 1 ? 1 : kCatalogMaxOrder);
    last_x = x;
  }
  return last[n];
}

double logmean_deriv(int m, double x) { return fact(m) * logmean_coeff(m, x); }

Interval positive_domain() { return Interval::open(0.0, kInf); }
Interval real_domain() { return Interval::open(-kInf, kInf); }
Interval unit_domain() { return Interval::open(-1.0, 1.0); }

CatalogEntry base_entry(Family fam, std::vector<double> params, std::string table_interval,
                        ScalarFunction fn) {
  CatalogEntry e;
  e.function = std::move(fn);
  e.family = fam;
  e.params = std::move(params);
  e.table_interval = std::move(table_interval);
  return e;
}

bool in_parity_set(double p, int first, int last) {
  // p in {first, first+2, ..., last}
  if (!is_integer(p)) return false;
  long q = std::lround(p);
  return q >= first && q <= last && ((q - first) % 2 == 0);
}

Tonicity combine(bool plus, bool minus) {
  if (plus && minus) return Tonicity::both;
  if (plus) return Tonicity::plus;
  if (minus) return Tonicity::minus;
  return Tonicity::neither;
}

Tonicity log_like_table(double p, int k) {
  bool plus = (k % 2) ? in_parity_set(p, 0, k - 1) : in_parity_set(p, 1, k - 1);
  bool minus = (k % 2) ? in_parity_set(p, 1, k - 2) : in_parity_set(p, 0, k - 2);
  return combine(plus, minus);
}

std::vector<double> parse_numbers(const std::string& s, const std::string& full) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) throw ParseError("bad number '" + tok + "' in '" + full + "'");
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw ParseError("bad number '" + tok + "' in '" + full + "'");
    }
  }
  return out;
}

std::string join_numbers(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += format_number(v[i]);
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------- helpers

std::string to_string(Tonicity t) {
  switch (t) {
    case Tonicity::plus: return "plus";
    case Tonicity::minus: return "minus";
    case Tonicity::both: return "both";
    case Tonicity::neither: return "neither";
  }
  return "neither";
}

Tonicity parse_tonicity(const std::string& s) {
  if (s == "plus") return Tonicity::plus;
  if (s == "minus") return Tonicity::minus;
  if (s == "both") return Tonicity::both;
  if (s == "neither") return Tonicity::neither;
  throw ParseError("unknown tonicity '" + s + "'");
}

Tonicity swap_sign(Tonicity t) {
  if (t == Tonicity::plus) return Tonicity::minus;
  if (t == Tonicity::minus) return Tonicity::plus;
  return t;
}

std::string family_name(Family f) {
  switch (f) {
    case Family::power: return "power";
    case Family::log: return "log";
    case Family::power_log: return "powerlog";
    case Family::power_over_x_plus_1: return "powx1";
    case Family::logmean: return "logmean";
    case Family::power_logmean: return "plogmean";
    case Family::polynomial: return "poly";
    case Family::moebius: return "moebius";
    case Family::affine_moebius: return "affmoebius";
    case Family::exp: return "exp";
    case Family::shifted_product: return "shift";
  }
  return "?";
}

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double falling_factorial(double p, int m) {
  double r = 1.0;
  for (int i = 0; i < m; ++i) r *= p - i;
  return r;
}

bool power_plus(double p, int k) {
  // [k-1-2i, k-2i] for i >= 0 while the left end stays >= -1
  for (int i = 0;; ++i) {
    double left = k - 1 - 2 * i;
    if (left < -1) break;
    if (p >= left - kIntTol && p <= left + 1 + kIntTol) return true;
  }
  return false;
}

bool power_minus(double p, int k) {
  // [k-2-2i, k-1-2i] for i >= 0 while the left end stays >= -1
  for (int i = 0;; ++i) {
    double left = k - 2 - 2 * i;
    if (left < -1) break;
    if (p >= left - kIntTol && p <= left + 1 + kIntTol) return true;
  }
  return false;
}

// ---------------------------------------------------------------- makers

CatalogEntry make_power(double p) {
  if (!std::isfinite(p)) throw ConfigError("power exponent must be finite");
  bool whole = is_integer(p) && p >= 0;
  Interval dom = whole ? real_domain() : positive_domain();
  ScalarFunction fn("power:" + format_number(p), dom, kCatalogMaxOrder,
                    [p](int m, double x) { return power_deriv(p, m, x); });
  fn = fn.with_operator_concave(p >= 0.0 && p <= 1.0);
  return base_entry(Family::power, {p}, "(0,inf)", fn);
}

CatalogEntry make_log() {
  ScalarFunction fn("log", positive_domain(), kCatalogMaxOrder, [](int m, double x) { return log_deriv(m, x); });
  return base_entry(Family::log, {}, "(0,inf)", fn.with_operator_concave(true));
}

CatalogEntry make_power_log(double p) {
  if (!std::isfinite(p)) throw ConfigError("power exponent must be finite");
  ScalarFunction fn("powerlog:" + format_number(p), positive_domain(), kCatalogMaxOrder,
                    [p](int m, double x) { return power_log_deriv(p, m, x); });
  return base_entry(Family::power_log, {p}, "(0,inf)", fn.with_operator_concave(p == 0.0));
}

CatalogEntry make_power_over_x_plus_1(double p) {
  if (!std::isfinite(p)) throw ConfigError("power exponent must be finite");
  ScalarFunction fn("powx1:" + format_number(p), positive_domain(), kCatalogMaxOrder, [p](int m, double x) {
    return leibniz_power(p, m, x, recip_deriv);
  });
  return base_entry(Family::power_over_x_plus_1, {p}, "(0,inf)", fn.with_operator_concave(p == 1.0));
}

CatalogEntry make_logmean() {
  ScalarFunction fn("logmean", positive_domain(), kCatalogMaxOrder,
                    [](int m, double x) { return logmean_deriv(m, x); });
  CatalogEntry e = base_entry(Family::logmean, {}, "(0,inf)", fn.with_operator_concave(true));
  return e;
}

CatalogEntry make_power_logmean(double p) {
  if (!std::isfinite(p)) throw ConfigError("power exponent must be finite");
  ScalarFunction fn("plogmean:" + format_number(p), positive_domain(), kCatalogMaxOrder, [p](int m, double x) {
    return leibniz_power(p, m, x, logmean_deriv);
  });
  CatalogEntry e = base_entry(Family::power_logmean, {p}, "(0,inf)", fn.with_operator_concave(p == 0.0));
  e.proof_omitted = true;
  return e;
}

CatalogEntry make_polynomial(const std::vector<double>& coeffs) {
  if (coeffs.empty()) throw ConfigError("polynomial needs at least one coefficient");
  for (double c : coeffs) {
    if (!std::isfinite(c)) throw ConfigError("polynomial coefficients must be finite");
  }
  std::vector<double> c = coeffs;
  ScalarFunction fn("poly:" + join_numbers(coeffs), real_domain(), kCatalogMaxOrder, [c](int m, double x) {
    double acc = 0.0;
    for (int i = static_cast<int>(c.size()) - 1; i >= m; --i) acc = acc * x + c[i] * falling_factorial(i, m);
    return acc;
  });
  return base_entry(Family::polynomial, coeffs, "(-inf,inf)", fn);
}

CatalogEntry make_moebius(double lambda) {
  if (!(std::abs(lambda) <= 1.0)) throw ConfigError("moebius parameter must lie in [-1, 1]");
  ScalarFunction fn("moebius:" + format_number(lambda), unit_domain(), kCatalogMaxOrder,
                    [lambda](int m, double x) {
                      double d = 1.0 - lambda * x;
                      if (m == 0) return x / d;
                      return fact(m) * ipow(lambda, m - 1) / ipow(d, m + 1);
                    });
  return base_entry(Family::moebius, {lambda}, "(-1,1)", fn);
}

CatalogEntry make_affine_moebius(double lambda) {
  if (!(std::abs(lambda) <= 1.0)) throw ConfigError("moebius parameter must lie in [-1, 1]");
  ScalarFunction fn("affmoebius:" + format_number(lambda), unit_domain(), kCatalogMaxOrder,
                    [lambda](int m, double x) {
                      double d = 1.0 - lambda * x;
                      if (m == 0) return (1.0 + x) / d;
                      return (1.0 + lambda) * fact(m) * ipow(lambda, m - 1) / ipow(d, m + 1);
                    });
  return base_entry(Family::affine_moebius, {lambda}, "(-1,1)", fn);
}

CatalogEntry make_exp() {
  ScalarFunction fn("exp", real_domain(), kCatalogMaxOrder, [](int, double x) { return std::exp(x); });
  return base_entry(Family::exp, {}, "", fn);
}

ScalarFunction shifted_product(const std::vector<double>& alphas, const ScalarFunction& g) {
  if (alphas.empty()) throw ConfigError("shifted product needs at least one shift");
  // ascending coefficients of prod (x - alpha_i)
  std::vector<double> poly{1.0};
  for (double a : alphas) {
    std::vector<double> next(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i + 1] += poly[i];
      next[i] -= a * poly[i];
    }
    poly = std::move(next);
  }
  int deg = static_cast<int>(alphas.size());
  auto poly_deriv = [poly](int m, double x) {
    double acc = 0.0;
    for (int i = static_cast<int>(poly.size()) - 1; i >= m; --i) acc = acc * x + poly[i] * falling_factorial(i, m);
    return acc;
  };
  return ScalarFunction("shift:" + join_numbers(alphas) + ":" + g.name(), g.domain(), g.max_deriv_order(),
                        [g, deg, poly_deriv](int m, double x) {
                          double s = 0.0;
                          for (int j = 0; j <= std::min(m, deg); ++j) {
                            s += binom(m, j) * poly_deriv(j, x) * g.deriv_unchecked(m - j, x);
                          }
                          return s;
                        });
}

CatalogEntry make_shifted_product(const std::vector<double>& alphas, const CatalogEntry& base) {
  CatalogEntry e = base_entry(Family::shifted_product, {}, base.table_interval, shifted_product(alphas, base.function));
  e.shifts = alphas;
  e.base = std::make_shared<const CatalogEntry>(base);
  e.proof_omitted = base.proof_omitted;
  return e;
}

CatalogEntry negate_entry(const CatalogEntry& e) {
  CatalogEntry n = e;
  n.function = negate(e.function);
  n.negated = !e.negated;
  return n;
}

// ---------------------------------------------------------------- tables

namespace {

Tonicity raw_expected(const CatalogEntry& e, int k) {
  const double p = e.params.empty() ? 0.0 : e.params[0];
  switch (e.family) {
    case Family::power:
      return combine(power_plus(p, k), power_minus(p, k));
    case Family::log:
      return log_like_table(0.0, k);
    case Family::power_log:
      return log_like_table(p, k);
    case Family::logmean:
      return log_like_table(0.0, k);
    case Family::power_logmean:
      return log_like_table(p, k);
    case Family::power_over_x_plus_1: {
      bool plus = (k % 2) ? in_parity_set(p, 1, k) : in_parity_set(p, 0, k);
      bool minus = (k % 2) ? in_parity_set(p, 0, k - 1) : in_parity_set(p, 1, k - 1);
      return combine(plus, minus);
    }
    case Family::polynomial: {
      int deg = static_cast<int>(e.params.size()) - 1;
      while (deg >= 0 && e.params[deg] == 0.0) --deg;
      if (deg < k) return Tonicity::both;
      if (deg > k) return Tonicity::neither;
      return e.params[deg] > 0 ? Tonicity::plus : Tonicity::minus;
    }
    case Family::moebius: {
      if (p == 0.0) return k == 1 ? Tonicity::plus : Tonicity::both;
      if (p > 0.0 || k % 2 == 1) return Tonicity::plus;
      return Tonicity::minus;
    }
    case Family::affine_moebius: {
      if (p == -1.0) return Tonicity::both;
      if (p == 0.0) return k == 1 ? Tonicity::plus : Tonicity::both;
      if (p > 0.0 || k % 2 == 1) return Tonicity::plus;
      return Tonicity::minus;
    }
    case Family::exp:
      throw CapabilityError("no tonicity table for exp");
    case Family::shifted_product: {
      int m = static_cast<int>(e.shifts.size());
      if (!e.base) throw CapabilityError("shifted product without base entry");
      if (e.base->table_interval == "(0,inf)") {
        for (double a : e.shifts) {
          if (a < 0.0) throw CapabilityError("shift points must be nonnegative on (0,inf)");
        }
      }
      if (k - m < 1) throw CapabilityError("shifted product table needs k > number of shifts");
      Tonicity b = expected_tonicity(*e.base, k - m);
      if (b == Tonicity::neither) throw CapabilityError("no table: base entry has verdict neither at order " +
                                                        std::to_string(k - m));
      return b;
    }
  }
  throw CapabilityError("no tonicity table");
}

}  // namespace

Tonicity expected_tonicity(const CatalogEntry& entry, int k) {
  if (k < 1) throw ContractViolation("tonicity order must be at least 1");
  Tonicity t = raw_expected(entry, k);
  return entry.negated ? swap_sign(t) : t;
}

std::map<int, Tonicity> expected_table(const CatalogEntry& entry, int kmax) {
  std::map<int, Tonicity> out;
  for (int k = 1; k <= kmax; ++k) {
    try {
      out[k] = expected_tonicity(entry, k);
    } catch (const CapabilityError&) {
    }
  }
  return out;
}

// ---------------------------------------------------------------- names

std::string entry_name(const std::string& family, double param) { return family + ":" + format_number(param); }

CatalogEntry parse_function(const std::string& name) {
  if (name.empty()) throw UnknownFunction("empty function name");
  if (name[0] == '-') return negate_entry(parse_function(name.substr(1)));
  auto colon = name.find(':');
  std::string fam = name.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : name.substr(colon + 1);
  auto one = [&]() {
    std::vector<double> v = parse_numbers(rest, name);
    if (v.size() != 1) throw ParseError("'" + name + "' needs exactly one parameter");
    return v[0];
  };
  auto none = [&]() {
    if (colon != std::string::npos) throw ParseError("'" + fam + "' takes no parameters");
  };
  if (fam == "power") return make_power(one());
  if (fam == "sqrt") {
    none();
    return make_power(0.5);
  }
  if (fam == "log") {
    none();
    return make_log();
  }
  if (fam == "powerlog") return make_power_log(one());
  if (fam == "powx1") return make_power_over_x_plus_1(one());
  if (fam == "logmean") {
    none();
    return make_logmean();
  }
  if (fam == "plogmean") return make_power_logmean(one());
  if (fam == "poly") {
    std::vector<double> c = parse_numbers(rest, name);
    return make_polynomial(c);
  }
  if (fam == "moebius") return make_moebius(one());
  if (fam == "affmoebius") return make_affine_moebius(one());
  if (fam == "exp") {
    none();
    return make_exp();
  }
  if (fam == "shift") {
    auto second = rest.find(':');
    if (second == std::string::npos) throw ParseError("shift needs 'shift:a1,a2,...:base'");
    std::vector<double> alphas = parse_numbers(rest.substr(0, second), name);
    return make_shifted_product(alphas, parse_function(rest.substr(second + 1)));
  }
  throw UnknownFunction("unknown function '" + name + "'");
}

std::vector<std::string> default_catalog_names() {
  return {"log",      "power:0.5",   "power:-1",   "power:-0.5", "power:1.5", "power:2",   "power:2.5",
          "power:3",  "powerlog:1",  "powx1:0",    "powx1:1",    "powx1:2",   "logmean",   "plogmean:1",
          "moebius:0.5", "moebius:-0.5", "shift:0.3:log"};
}

}  // namespace ktone
