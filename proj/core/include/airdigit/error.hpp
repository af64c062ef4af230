#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace airdigit {

enum class ErrorCode {
  InvalidSignal,
  InvalidFilterSpec,
  InvalidLength,
  TooShort,
  WrongLength,
  UnknownDigit,
  InvalidTemplate,
  InvalidParams,
  JointLimit,
  Unreachable,
  NoConvergence,
  PlanningFailed,
  EmptySplit,
  ProvenanceViolation,
  EmptyClass,
  IncompatibleReport,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorCode code);

// Every failure in the library surfaces as an Error carrying a code, so callers
// (and the CLI exit-code mapping) can branch on the category.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by trajectory planning; remembers which Cartesian point failed.
class PlanningError : public Error {
 public:
  PlanningError(std::size_t index, ErrorCode cause, const std::string& what)
      : Error(ErrorCode::PlanningFailed,
              "point " + std::to_string(index) + " (" + std::string(to_string(cause)) + "): " + what),
        index_(index),
        cause_(cause) {}

  std::size_t index() const noexcept { return index_; }
  ErrorCode cause() const noexcept { return cause_; }

 private:
  std::size_t index_;
  ErrorCode cause_;
};

}  // namespace airdigit
