#pragma once

#include <stdexcept>
#include <string>

namespace impute {

/// Bad argument or violated precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for numerical failures raised while fitting or estimating.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularDesign : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InsufficientData : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A statistic is undefined for the input, e.g. a correlation on a constant column.
class UndefinedStatistic : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Weighted amputation scores have zero spread; the weight vector is unusable.
class DegenerateScores : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace impute
