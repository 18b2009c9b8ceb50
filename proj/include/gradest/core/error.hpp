#pragma once

#include <stdexcept>
#include <string>

namespace gradest {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (e.g. a(t) at t <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A coefficient family violates the structure conditions at a sample point.
class StructureViolation : public Error {
 public:
  StructureViolation(const std::string& what, double sample)
      : Error(what), sample_(sample) {}
  double sample() const noexcept { return sample_; }

 private:
  double sample_;
};

/// Exponent hypotheses (gamma > p-1, p >= 2, q >= q_end, ...) violated.
class RegimeError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Shape or grid mismatch between operands.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Source does not belong to the requested Lebesgue space.
class MembershipError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Requested configuration is valid mathematically but not solved by this code (lambda = 0).
class UnsupportedRegime : public Error {
 public:
  using Error::Error;
};

/// Ledger evaluation refused its input (unconverged iterate, ProofGap exponents).
class RejectedInput : public Error {
 public:
  using Error::Error;
};

}  // namespace gradest
