#include "airdigit/error.hpp"

namespace airdigit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSignal: return "InvalidSignal";
    case ErrorCode::InvalidFilterSpec: return "InvalidFilterSpec";
    case ErrorCode::InvalidLength: return "InvalidLength";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::WrongLength: return "WrongLength";
    case ErrorCode::UnknownDigit: return "UnknownDigit";
    case ErrorCode::InvalidTemplate: return "InvalidTemplate";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::JointLimit: return "JointLimit";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::PlanningFailed: return "PlanningFailed";
    case ErrorCode::EmptySplit: return "EmptySplit";
    case ErrorCode::ProvenanceViolation: return "ProvenanceViolation";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::IncompatibleReport: return "IncompatibleReport";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace airdigit
