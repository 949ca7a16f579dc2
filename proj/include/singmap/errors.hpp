#pragma once

#include <stdexcept>
#include <string>

namespace singmap {

// Failure categories. The CLI maps each to a distinct exit status.
enum class ErrorCode {
  Config,           // invalid parameters, grids, files
  NonConvergence,   // Newton budget exhausted
  SingularJacobian, // factorization failed
  BoundBreach,      // sup|Phi| left the configured guard
  FitUnstable,      // regression quality too poor to report
  InvariantBreach   // a checked identity failed
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline int exit_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::Config: return 2;
    case ErrorCode::NonConvergence:
    case ErrorCode::SingularJacobian:
    case ErrorCode::BoundBreach: return 3;
    case ErrorCode::FitUnstable: return 4;
    case ErrorCode::InvariantBreach: return 5;
  }
  return 1;
}

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::Config: return "config";
    case ErrorCode::NonConvergence: return "non_convergence";
    case ErrorCode::SingularJacobian: return "singular_jacobian";
    case ErrorCode::BoundBreach: return "bound_breach";
    case ErrorCode::FitUnstable: return "fit_unstable";
    case ErrorCode::InvariantBreach: return "invariant_breach";
  }
  return "unknown";
}

[[noreturn]] inline void fail(ErrorCode c, const std::string& msg) {
  throw Error(c, msg);
}

inline void require(bool ok, const std::string& msg) {
  if (!ok) fail(ErrorCode::Config, msg);
}

}  // namespace singmap
