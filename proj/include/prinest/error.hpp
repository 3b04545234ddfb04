#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace prinest {

enum class ErrorCode {
  ParseError,
  ParameterOutOfRange,
  DomainError,
  NoPreimage,
  SingularAtCritical,
  PrecisionExhausted,
  PullbackEscapes,
  NotBuilt,
  Ambiguous,
  CapExceeded,
  EscapeNotFound,
  NotInDomain,
  NoFixedPoint,
  InsufficientData,
  NotRealized,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace prinest
