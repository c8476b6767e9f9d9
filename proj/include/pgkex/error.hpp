#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pgkex {

enum class ErrorKind {
  NotPrime,
  RangeViolation,
  WidthOverflow,
  IndexOutOfRange,
  ParamMismatch,
  ParseError,
  TooLarge,
  CentralElement,
  NotHomomorphism,
  NotAutomorphism,
  NotApplicable,
  Degenerate,
  NoWitness,
  FrameTooLarge,
  Truncated,
  BadJson,
  BadVersion,
  DigestMismatch,
  Timeout,
  IoError,
};

std::string_view error_name(ErrorKind kind) noexcept;

/// Every failure in the toolkit is reported as an Error carrying its kind;
/// the CLI prints `error_name(kind())` verbatim.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(error_name(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return error_name(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace pgkex
