#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ktone/scalar_function.hpp"

namespace ktone {

enum class Tonicity { plus, minus, both, neither };

std::string to_string(Tonicity t);
Tonicity parse_tonicity(const std::string& s);
Tonicity swap_sign(Tonicity t);

enum class Family {
  power,
  log,
  power_log,
  power_over_x_plus_1,
  logmean,
  power_logmean,
  polynomial,
  moebius,
  affine_moebius,
  exp,
  shifted_product,
};

std::string family_name(Family f);

/// Derivative oracles are exact closed forms up to this order.
inline constexpr int kCatalogMaxOrder = 30;

struct CatalogEntry {
  ScalarFunction function;
  Family family = Family::power;
  std::vector<double> params;
  /// Interval on which the expected table is stated.
  std::string table_interval;
  /// Table asserted without a published proof.
  bool proof_omitted = false;
  bool negated = false;
  /// Shift points and base entry for shifted products.
  std::vector<double> shifts;
  std::shared_ptr<const CatalogEntry> base;

  const std::string& name() const { return function.name(); }
};

CatalogEntry make_power(double p);
CatalogEntry make_log();
CatalogEntry make_power_log(double p);
CatalogEntry make_power_over_x_plus_1(double p);
CatalogEntry make_logmean();
/// x^p (x - 1) / log x.
CatalogEntry make_power_logmean(double p);
/// Coefficients in ascending degree.
CatalogEntry make_polynomial(const std::vector<double>& coeffs);
/// x / (1 - lambda x) on (-1, 1).
CatalogEntry make_moebius(double lambda);
/// (1 + x) / (1 - lambda x) on (-1, 1).
CatalogEntry make_affine_moebius(double lambda);
CatalogEntry make_exp();
/// prod_i (x - alpha_i) * base(x).
CatalogEntry make_shifted_product(const std::vector<double>& alphas, const CatalogEntry& base);
CatalogEntry negate_entry(const CatalogEntry& e);

/// Expected verdict at order k on the entry's table interval; CapabilityError when no table applies.
Tonicity expected_tonicity(const CatalogEntry& entry, int k);
/// Fixture table for k = 1..kmax (entries without a verdict are omitted).
std::map<int, Tonicity> expected_table(const CatalogEntry& entry, int kmax = 6);

/// Predicates behind the power tables.
bool power_plus(double p, int k);
bool power_minus(double p, int k);

/// Name grammar: [-]family[:params], e.g. "power:0.5", "logmean", "poly:1,0,2", "shift:0.3:log".
CatalogEntry parse_function(const std::string& name);
/// Family name and parameter list to a canonical entry name.
std::string entry_name(const std::string& family, double param);
std::string format_number(double v);

/// Representative entries used by catalog-wide checks.
std::vector<std::string> default_catalog_names();

/// prod_i (x - alpha_i) * g(x) as a plain scalar function.
ScalarFunction shifted_product(const std::vector<double>& alphas, const ScalarFunction& g);

/// Falling factorial p (p-1) ... (p-m+1).
double falling_factorial(double p, int m);

}  // namespace ktone
