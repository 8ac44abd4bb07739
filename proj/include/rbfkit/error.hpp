#pragma once
/// @file error.hpp
/// Exception hierarchy shared by every rbfkit module.

#include <limits>
#include <stdexcept>
#include <string>

namespace rbfkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDomainError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class PartitionError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Raised when a kernel or one of its derivatives is evaluated where it is
/// not defined (a pole at r = 0, or an undefined derivative limit).
class SingularityError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class InvalidKernelError : public Error {
 public:
  using Error::Error;
};

class KernelSmoothnessError : public Error {
 public:
  using Error::Error;
};

class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class RankError : public Error {
 public:
  using Error::Error;
};

/// A dense solve whose matrix is singular or whose condition estimate
/// exceeds the configured limit. Carries the estimate.
class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, double estimate)
      : Error(what + " (condition estimate " + std::to_string(estimate) + ")"),
        estimate_(estimate) {}

  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_ = std::numeric_limits<double>::infinity();
};

}  // namespace rbfkit
