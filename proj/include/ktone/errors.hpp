#pragma once

#include <stdexcept>
#include <string>

namespace ktone {

enum class ErrorKind {
  contract,
  domain,
  capability,
  numerical,
  config,
  parse,
  unknown_function,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Caller broke a precondition (non-symmetric input, malformed partition, ...).
class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& what) : Error(ErrorKind::contract, what) {}
};

/// A point or eigenvalue fell outside the function's open domain.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

/// The function cannot supply a requested derivative order or table entry.
class CapabilityError : public Error {
 public:
  explicit CapabilityError(const std::string& what) : Error(ErrorKind::capability, what) {}
};

class NumericalFailure : public Error {
 public:
  explicit NumericalFailure(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorKind::parse, what) {}
};

class UnknownFunction : public Error {
 public:
  explicit UnknownFunction(const std::string& what) : Error(ErrorKind::unknown_function, what) {}
};

/// Partition points closer than the distinctness threshold.
class ConfluentPartition : public ContractViolation {
 public:
  explicit ConfluentPartition(const std::string& what) : ContractViolation(what) {}
};

}  // namespace ktone
