#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace leakywire {

/// Base class of every error raised by the library. The message is prefixed
/// with the name of the module that raised it, e.g. "operators: kappa <= 0".
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& message)
      : std::runtime_error(module + ": " + message), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

/// Invalid argument or an argument outside the mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Arc-length parameter outside the range covered by a sampled curve.
class OutOfDomainError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Two distinct arc-length parameters map to the same point (chord-arc bound fails).
class SingularGeometryError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Frenet frame requested at a curvature zero with the strict frame policy.
class DegenerateFrameError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A kernel matrix that should be entrywise non-negative is not.
class InvalidKernelError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Field point too close to the curve for nodal summation.
class NearSingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Eigensolver, root finder or fit failed to produce a trustworthy result.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// No sign change of lambda_j(kappa) - alpha before the bracket limit.
class BracketFailure : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

/// Ill-conditioned trace fit.
class FitError : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

/// Malformed input file, bad flag combination or I/O failure.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace leakywire
