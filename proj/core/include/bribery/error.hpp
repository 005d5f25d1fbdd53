#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bribery {

enum class ErrorCode {
  kParse,
  kInvalidArgument,
  kDegenerateChain,
  kSingularMatrix,
  kInfeasible,
};

std::string_view to_string(ErrorCode code);

// Every recoverable failure in the engine is reported through this type so the
// CLI can turn it into a machine-readable record.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace bribery
