#include "nullsteer/error.hpp"

namespace nullsteer {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::invalid_matrix: return "invalid-matrix";
    case ErrorCode::invalid_input: return "invalid-input";
    case ErrorCode::numerical_failure: return "numerical-failure";
    case ErrorCode::root_too_close_to_spectrum: return "root-too-close-to-spectrum";
    case ErrorCode::pole: return "pole";
    case ErrorCode::no_bright_subspace: return "no-bright-subspace";
    case ErrorCode::bound_not_applicable: return "bound-not-applicable";
    case ErrorCode::certain_detection: return "certain-detection";
    case ErrorCode::exceptional_spectrum: return "exceptional-spectrum";
    case ErrorCode::unsupported_multiplicity: return "unsupported-multiplicity";
    case ErrorCode::not_applicable: return "not-applicable";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::config_error: return "config-error";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace nullsteer
