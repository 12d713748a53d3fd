#pragma once

#include <functional>
#include <memory>
#include <string>

#include "ktone/interval.hpp"

namespace ktone {

/// Real function on an open interval with a derivative oracle up to a fixed order.
///
/// Copies share the underlying oracle; instances are immutable.
class ScalarFunction {
 public:
  using Oracle = std::function<double(int order, double x)>;

  ScalarFunction() = default;
  ScalarFunction(std::string name, Interval domain, int max_deriv_order, Oracle oracle);

  const std::string& name() const { return name_; }
  const Interval& domain() const { return domain_; }
  int max_deriv_order() const { return max_order_; }
  bool operator_concave() const { return operator_concave_; }

  double eval(double x) const;
  double operator()(double x) const { return eval(x); }
  /// m-th derivative; throws CapabilityError for m > max_deriv_order().
  double deriv(int m, double x) const;
  /// Derivative evaluation without the domain check (used on interval ends by limit probes).
  double deriv_unchecked(int m, double x) const;

  ScalarFunction with_name(std::string name) const;
  ScalarFunction with_operator_concave(bool flag) const;
  explicit operator bool() const { return static_cast<bool>(oracle_); }

 private:
  std::string name_;
  Interval domain_;
  int max_order_ = 0;
  bool operator_concave_ = false;
  std::shared_ptr<const Oracle> oracle_;
};

ScalarFunction negate(const ScalarFunction& f);
/// c * f for a real constant c.
ScalarFunction scale(const ScalarFunction& f, double c);

}  // namespace ktone
