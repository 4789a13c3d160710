#pragma once

#include <stdexcept>
#include <string>

namespace rgc {

/// Operation received data violating its preconditions (shape mismatch,
/// non-finite values, too few elements).
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configuration value is outside its documented range.
class InvalidConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Optimization produced non-finite gradients, parameters, or losses.
class TrainingDivergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A metric was requested on an input where it is undefined
/// (e.g. AUROC with a single class present).
class UndefinedMetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A geometric identity was requested for zero-norm gradients.
class DegenerateGeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rgc
