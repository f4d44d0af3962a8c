#pragma once

#include <stdexcept>
#include <string>

namespace smbp {

/// Failure categories. The numeric value is the CLI exit code.
enum class ErrorKind { validation = 1, data = 2, numerical = 3 };

enum class ErrorCode {
  dimension_mismatch,
  insufficient_points,
  unsupported_grid,
  sample_too_small,
  degenerate_covariance,
  index_out_of_range,
  insufficient_spectrum,
  degenerate_scores,
  grid_too_large,
  invalid_input,
  degenerate_partition,
  group_too_small,
  missing_group,
  infeasible_folds,
  infeasible_k,
  parse_error,
  io_error,
};

constexpr ErrorKind kind_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::degenerate_covariance:
    case ErrorCode::insufficient_spectrum:
    case ErrorCode::degenerate_scores:
      return ErrorKind::numerical;
    case ErrorCode::index_out_of_range:
    case ErrorCode::grid_too_large:
    case ErrorCode::invalid_input:
    case ErrorCode::infeasible_folds:
    case ErrorCode::infeasible_k:
      return ErrorKind::validation;
    default:
      return ErrorKind::data;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return kind_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace smbp
