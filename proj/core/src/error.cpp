#include "bribery/error.hpp"

namespace bribery {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kDegenerateChain: return "degenerate_chain";
    case ErrorCode::kSingularMatrix: return "singular_matrix";
    case ErrorCode::kInfeasible: return "infeasible";
  }
  return "unknown";
}

}  // namespace bribery
