#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lindstedt {

class LindstedtError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public LindstedtError {
 public:
  using LindstedtError::LindstedtError;
};

// e^{2|l|rho} left the representable range while computing a norm.
class NormOverflow : public LindstedtError {
 public:
  using LindstedtError::LindstedtError;
};

class NonZeroAverage : public LindstedtError {
 public:
  using LindstedtError::LindstedtError;
};

// l.omega lies on 2*pi*Z for some nonzero l in the inverted range.
class ExactResonance : public LindstedtError {
 public:
  using LindstedtError::LindstedtError;
};

class MissingOrder : public LindstedtError {
 public:
  using LindstedtError::LindstedtError;
};

class DegenerateAverage : public LindstedtError {
 public:
  using LindstedtError::LindstedtError;
};

class NondegeneracyFailure : public LindstedtError {
 public:
  using LindstedtError::LindstedtError;
};

class InsufficientData : public LindstedtError {
 public:
  using LindstedtError::LindstedtError;
};

class ConfigError : public LindstedtError {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

}  // namespace lindstedt
