#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace msdn {

/// Base of every error raised by the library. The CLI maps subclasses onto
/// exit codes (config 2, I/O 3, numeric 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public IoError {
 public:
  using IoError::IoError;
};

class FormatError : public IoError {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : IoError(what + " (at byte offset " + std::to_string(offset) + ")"),
        detail_(what),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }
  /// Message without the offset suffix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  std::uint64_t offset_;
};

}  // namespace msdn
