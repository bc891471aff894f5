#include "awgrpon/error.hpp"

namespace awgrpon {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::PortExhaustion: return "PortExhaustion";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::TopologyMismatch: return "TopologyMismatch";
    case ErrorCode::InfeasibleSolution: return "InfeasibleSolution";
    case ErrorCode::UnknownServer: return "UnknownServer";
    case ErrorCode::UnknownGrant: return "UnknownGrant";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace awgrpon
