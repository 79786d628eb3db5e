#pragma once

#include <stdexcept>
#include <string>

namespace agesvd {

/// Process exit status used by the command-line front end.
enum class ExitCode : int {
  ok = 0,
  usage = 1,
  data = 2,
  numerical = 3,
};

/// Base of every exception thrown by the library. Each subclass carries the
/// exit status the CLI reports for it.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual ExitCode code() const noexcept = 0;
};

/// Caller passed an out-of-range parameter (component count, k, age bounds).
class UsageError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode code() const noexcept override { return ExitCode::usage; }
};

/// Input data is malformed: shape or label mismatch, non-finite or
/// non-positive values, unparsable files.
class DataError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode code() const noexcept override { return ExitCode::data; }
};

/// A computation could not be completed (rank-deficient design, singular
/// covariance, failed convergence).
class NumericalError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode code() const noexcept override { return ExitCode::numerical; }
};

}  // namespace agesvd
