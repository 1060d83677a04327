#pragma once

#include <stdexcept>
#include <string>

namespace aras {

enum class ErrorCode {
  kIndexOutOfRange,
  kDimensionMismatch,
  kInvalidProblem,
  kCoverTooLarge,
  kSolverStuck,
  kCapExceeded,
  kParseError,
  kSchemaViolation,
};

const char* ToString(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// command-line front end can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ToString(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIndexOutOfRange: return "index-out-of-range";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kInvalidProblem: return "invalid-problem";
    case ErrorCode::kCoverTooLarge: return "cover-too-large";
    case ErrorCode::kSolverStuck: return "solver-stuck";
    case ErrorCode::kCapExceeded: return "cap-exceeded";
    case ErrorCode::kParseError: return "parse-error";
    case ErrorCode::kSchemaViolation: return "schema-violation";
  }
  return "unknown";
}

}  // namespace aras
