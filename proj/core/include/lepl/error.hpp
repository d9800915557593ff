#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lepl {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data: bad file syntax, invariant violations on labels or
/// features, or shape disagreement between matrices that must line up.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error(what) {}
  FormatError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

  /// 1-based line number of the offending input, 0 when not file-bound.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

/// Two operands disagree in shape.
class ShapeError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// A quantity is numerically undefined (zero-norm cosine, vacuous bound, ...).
class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lepl
