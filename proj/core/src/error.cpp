#include "fodgmm/error.hpp"

namespace fodgmm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnbalancedPanel: return "UnbalancedPanel";
    case ErrorCode::DuplicateCell: return "DuplicateCell";
    case ErrorCode::TooFewPeriods: return "TooFewPeriods";
    case ErrorCode::InfeasiblePlan: return "InfeasiblePlan";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::SingularMoment: return "SingularMoment";
    case ErrorCode::SingularWeight: return "SingularWeight";
    case ErrorCode::NonStationary: return "NonStationary";
    case ErrorCode::MissingBaseline: return "MissingBaseline";
    case ErrorCode::InfeasibleCell: return "InfeasibleCell";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig: return 2;
    case ErrorCode::IoError: return 3;
    case ErrorCode::ParseError: return 10;
    case ErrorCode::UnbalancedPanel: return 11;
    case ErrorCode::DuplicateCell: return 12;
    case ErrorCode::TooFewPeriods: return 13;
    case ErrorCode::InfeasiblePlan: return 20;
    case ErrorCode::RankDeficient: return 21;
    case ErrorCode::SingularMoment: return 22;
    case ErrorCode::SingularWeight: return 23;
    case ErrorCode::NonStationary: return 30;
    case ErrorCode::MissingBaseline: return 31;
    case ErrorCode::InfeasibleCell: return 32;
  }
  return 1;
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<int> period)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      detail_(message),
      period_(period) {}

}  // namespace fodgmm
