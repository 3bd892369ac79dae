#include "einst/error.hpp"

namespace einst {

std::string_view to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kStageInput: return "stage_input";
    case ErrorCategory::kData: return "data";
    case ErrorCategory::kTransport: return "transport";
    case ErrorCategory::kProtocol: return "protocol";
    case ErrorCategory::kScriptMiss: return "script_miss";
    case ErrorCategory::kIo: return "io";
  }
  return "unknown";
}

// 1 is left for failures outside the taxonomy.
int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kConfig: return 2;
    case ErrorCategory::kStageInput: return 3;
    case ErrorCategory::kTransport: return 4;
    case ErrorCategory::kProtocol: return 5;
    case ErrorCategory::kData: return 6;
    case ErrorCategory::kScriptMiss: return 7;
    case ErrorCategory::kIo: return 8;
  }
  return 1;
}

}  // namespace einst
