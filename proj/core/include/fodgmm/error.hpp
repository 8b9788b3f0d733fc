#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fodgmm {

/// Failure categories raised by the library. The CLI maps each one to a
/// distinct process exit code.
enum class ErrorCode {
  ParseError,
  UnbalancedPanel,
  DuplicateCell,
  TooFewPeriods,
  InfeasiblePlan,
  RankDeficient,
  SingularMoment,
  SingularWeight,
  NonStationary,
  MissingBaseline,
  InfeasibleCell,
  InvalidConfig,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Exit status used by the command-line tool for an error of this kind.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<int> period = std::nullopt);

  ErrorCode code() const noexcept { return code_; }

  /// Transformed-equation index (1-based) the failure refers to, if any.
  std::optional<int> period() const noexcept { return period_; }

  /// The message without the error-code prefix carried by what().
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
  std::optional<int> period_;
};

}  // namespace fodgmm
