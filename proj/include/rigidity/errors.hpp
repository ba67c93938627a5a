#pragma once

#include <stdexcept>
#include <string>

namespace rigidity {

enum class ErrorKind {
  Trapped,
  TangentExit,
  NonPositive,
  OutOfClass,
  IdentityViolation,
  GridMismatch,
  GridTooCoarse,
  OutOfRange,
  Diverged,
  RankDeficient,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

// Numerical failure raised by any module. The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Malformed scenario or medium description. The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rigidity
