#pragma once

#include <stdexcept>
#include <string>

namespace blowlab {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad user input: config schema violations, out-of-range parameters.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

// An argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

// The numerics gave up: dt underflow, divergent iteration, overflow in a
// linear-space API that the caller should have used in log form.
class NumericalError : public Error {
public:
  explicit NumericalError(const std::string& what) : Error(what) {}
};

// A run hit its time or step budget without reaching blow-up.
class GlobalExistenceSuspected : public Error {
public:
  explicit GlobalExistenceSuspected(const std::string& what) : Error(what) {}
};

} // namespace blowlab
