#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nullsteer {

enum class ErrorCode : std::uint8_t {
  invalid_parameter,
  invalid_matrix,
  invalid_input,
  numerical_failure,
  root_too_close_to_spectrum,
  pole,
  no_bright_subspace,
  bound_not_applicable,
  certain_detection,
  exceptional_spectrum,
  unsupported_multiplicity,
  not_applicable,
  degenerate,
  config_error,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when a survival step leaves no amplitude: the null record cannot
/// continue. step() is 1-based and counts measurements.
class CertainDetection : public Error {
 public:
  CertainDetection(std::int64_t step, const std::string& what)
      : Error(ErrorCode::certain_detection, what), step_(step) {}

  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t step_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace nullsteer
