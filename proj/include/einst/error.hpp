#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace einst {

// Coarse failure classes. The CLI maps each to a distinct exit status.
enum class ErrorCategory {
  kConfig,
  kStageInput,
  kData,
  kTransport,
  kProtocol,
  kScriptMiss,
  kIo,
};

std::string_view to_string(ErrorCategory category);
int exit_code(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorCategory::kConfig, message) {}
};

class StageInputError : public Error {
 public:
  explicit StageInputError(const std::string& message)
      : Error(ErrorCategory::kStageInput, message) {}
};

/// Invalid records, violated preconditions on domain data, alignment failures.
class DataError : public Error {
 public:
  explicit DataError(const std::string& message)
      : Error(ErrorCategory::kData, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message)
      : Error(ErrorCategory::kIo, message) {}
};

}  // namespace einst
