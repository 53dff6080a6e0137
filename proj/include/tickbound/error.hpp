#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tickbound {

enum class ErrorCode {
  invalid_tick,
  unsorted_input,
  empty_window,
  empty_lagged_window,
  degenerate_window,
  undefined_cv,
  pairing_mismatch,
  incomplete_spec,
  infeasible_spec,
  invalid_stats,
  domain,
  parse,
  schema,
  io,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_tick: return "invalid tick";
    case ErrorCode::unsorted_input: return "unsorted input";
    case ErrorCode::empty_window: return "empty window";
    case ErrorCode::empty_lagged_window: return "empty lagged window";
    case ErrorCode::degenerate_window: return "degenerate window";
    case ErrorCode::undefined_cv: return "undefined coefficient of variation";
    case ErrorCode::pairing_mismatch: return "pairing mismatch";
    case ErrorCode::incomplete_spec: return "incomplete spec";
    case ErrorCode::infeasible_spec: return "infeasible spec";
    case ErrorCode::invalid_stats: return "invalid stats";
    case ErrorCode::domain: return "domain error";
    case ErrorCode::parse: return "parse error";
    case ErrorCode::schema: return "schema error";
    case ErrorCode::io: return "I/O error";
  }
  return "error";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

  /// True for failures caused by a numerically degenerate (but well-formed) input.
  [[nodiscard]] bool is_degeneracy() const noexcept {
    return code_ == ErrorCode::degenerate_window || code_ == ErrorCode::undefined_cv ||
           code_ == ErrorCode::empty_lagged_window;
  }

 private:
  ErrorCode code_;
};

}  // namespace tickbound
