#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rs {

// Error taxonomy maps onto process exit codes:
//   ConfigError, IoError        -> 1 (bad inputs)
//   NumericalError and children -> 2 (runtime numerical failure)
// Verification failures are reported through return values, not exceptions.

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Circulant embedding produced a significantly negative eigenvalue. For the
// covariances sampled here the embedding is provably nonnegative definite, so
// this indicates a bug or an unsupported parameter, not bad luck.
class EmbeddingError : public NumericalError {
 public:
  EmbeddingError(const std::string& what, double min_eigenvalue)
      : NumericalError(what), min_eigenvalue(min_eigenvalue) {}
  double min_eigenvalue;
};

class QuadratureError : public NumericalError {
 public:
  explicit QuadratureError(const std::string& what) : NumericalError(what) {}
};

// A non-finite value appeared while stepping a path.
class InstabilityError : public NumericalError {
 public:
  InstabilityError(const std::string& what, std::size_t step_index)
      : NumericalError(what), step_index(step_index) {}
  std::size_t step_index;
};

}  // namespace rs
