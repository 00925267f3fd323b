#pragma once

#include <stdexcept>
#include <string>

namespace rlmc {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid argument to an operation (out-of-domain state, bad index, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Invalid or inconsistent configuration (unresolvable names, bad parameters).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure failed (non-finite value, quadrature non-convergence).
// Carries an optional (time, sample) location for solver failures.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, long time_index = -1,
                          long sample_index = -1)
      : Error(what), time_index(time_index), sample_index(sample_index) {}

  long time_index;
  long sample_index;
};

// Input data is unusable (e.g. a non-finite regression target).
class DataError : public Error {
 public:
  explicit DataError(const std::string& what, long offending_index = -1)
      : Error(what), offending_index(offending_index) {}

  long offending_index;
};

// The requested operation needs a model capability that is not declared
// (e.g. a transition density).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// Basis Gram matrix is numerically singular beyond jitter recovery.
class ConditioningError : public Error {
 public:
  explicit ConditioningError(const std::string& what, double min_eigenvalue)
      : Error(what), min_eigenvalue(min_eigenvalue) {}

  double min_eigenvalue;
};

}  // namespace rlmc
