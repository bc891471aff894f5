#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace awgrpon {

enum class ErrorCode {
  InvalidParameter,
  PortExhaustion,
  OutOfRange,
  UnknownNode,
  TopologyMismatch,
  InfeasibleSolution,
  UnknownServer,
  UnknownGrant,
  InvalidK,
  DivisionByZero,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace awgrpon
