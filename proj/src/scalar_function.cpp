#include "ktone/scalar_function.hpp"

#include <cstdio>

#include "ktone/errors.hpp"

namespace ktone {

ScalarFunction::ScalarFunction(std::string name, Interval domain, int max_deriv_order, Oracle oracle)
    : name_(std::move(name)),
      domain_(domain),
      max_order_(max_deriv_order),
      oracle_(std::make_shared<const Oracle>(std::move(oracle))) {
  if (max_deriv_order < 0) throw ContractViolation("max derivative order must be nonnegative");
  if (!*oracle_) throw ContractViolation("scalar function needs an oracle");
}

double ScalarFunction::eval(double x) const {
  if (!domain_.contains(x)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    throw DomainError("point " + std::string(buf) + " outside domain " + domain_.to_string() + " of " + name_);
  }
  return (*oracle_)(0, x);
}

double ScalarFunction::deriv(int m, double x) const {
  if (m < 0) throw ContractViolation("negative derivative order");
  if (m > max_order_) {
    throw CapabilityError(name_ + " supplies derivatives up to order " + std::to_string(max_order_) +
                          ", order " + std::to_string(m) + " requested");
  }
  if (!domain_.contains(x)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    throw DomainError("point " + std::string(buf) + " outside domain " + domain_.to_string() + " of " + name_);
  }
  return (*oracle_)(m, x);
}

double ScalarFunction::deriv_unchecked(int m, double x) const { return (*oracle_)(m, x); }

ScalarFunction ScalarFunction::with_name(std::string name) const {
  ScalarFunction f = *this;
  f.name_ = std::move(name);
  return f;
}

ScalarFunction ScalarFunction::with_operator_concave(bool flag) const {
  ScalarFunction f = *this;
  f.operator_concave_ = flag;
  return f;
}

ScalarFunction negate(const ScalarFunction& f) {
  std::string name = f.name();
  if (!name.empty() && name[0] == '-') {
    name = name.substr(1);
  } else {
    name = "-" + name;
  }
  return ScalarFunction(name, f.domain(), f.max_deriv_order(),
                        [f](int m, double x) { return -f.deriv_unchecked(m, x); });
}

ScalarFunction scale(const ScalarFunction& f, double c) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g*", c);
  return ScalarFunction(buf + f.name(), f.domain(), f.max_deriv_order(),
                        [f, c](int m, double x) { return c * f.deriv_unchecked(m, x); });
}

}  // namespace ktone
