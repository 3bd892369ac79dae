#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "einst/error.hpp"

namespace einst {

struct CompletionRequest {
  std::string prompt;
  int max_tokens = 512;
  double temperature = 0.7;
  std::optional<std::string> stop;
  // Overrides the backend's model id when nonempty.
  std::string model_id;

  // Throws DataError unless max_tokens >= 1 and temperature >= 0.
  void validate() const;
};

struct Completion {
  // Already cut at the first occurrence of the stop sequence.
  std::string text;
  // The backend stopped because it hit max_tokens.
  bool truncated = false;
  int attempts = 1;
};

enum class BackendKind { kHttp, kMock };

std::string_view to_string(BackendKind kind);

struct BackendDescriptor {
  std::string name;
  BackendKind kind = BackendKind::kMock;
  std::optional<std::string> base_url;
  // Instruction-tuned model (prompted zero-shot for additional outputs).
  bool instructed = false;
  std::string model_id;
  std::size_t parallelism = 4;
  int max_retries = 3;
  // Environment variable holding the bearer token; unset or empty means no
  // Authorization header.
  std::string api_key_env = "OPENAI_API_KEY";
  std::chrono::milliseconds backoff_base{500};
  std::chrono::milliseconds timeout{120000};

  // Throws ConfigError: http needs base_url, parallelism >= 1, retries >= 0.
  void validate() const;
};

class TransportError : public Error {
 public:
  explicit TransportError(const std::string& message)
      : Error(ErrorCategory::kTransport, message) {}
};

class ProtocolError : public Error {
 public:
  ProtocolError(int status, std::string body_excerpt, const std::string& message)
      : Error(ErrorCategory::kProtocol, message),
        status_(status),
        body_excerpt_(std::move(body_excerpt)) {}

  int status() const noexcept { return status_; }
  const std::string& body_excerpt() const noexcept { return body_excerpt_; }

 private:
  int status_;
  std::string body_excerpt_;
};

class ScriptMissError : public Error {
 public:
  explicit ScriptMissError(const std::string& message)
      : Error(ErrorCategory::kScriptMiss, message) {}
};

// A language model behind the completion interface. Shareable across
// threads; at most descriptor().parallelism calls run at once.
class Backend {
 public:
  explicit Backend(BackendDescriptor descriptor);
  virtual ~Backend() = default;
  Backend(const Backend&) = delete;
  Backend& operator=(const Backend&) = delete;

  const BackendDescriptor& descriptor() const { return descriptor_; }
  const std::string& name() const { return descriptor_.name; }
  bool instructed() const { return descriptor_.instructed; }

  Completion complete(const CompletionRequest& request);

  // Results come back in request order. Backends whose replies depend on
  // call order (scripted mocks) are driven sequentially so runs stay
  // reproducible; others fan out up to the parallelism bound.
  std::vector<Completion> complete_all(std::span<const CompletionRequest> requests);

  // Replies depend on the order calls arrive in.
  virtual bool order_sensitive() const { return false; }

 protected:
  virtual Completion do_complete(const CompletionRequest& request) = 0;

 private:
  BackendDescriptor descriptor_;
  std::mutex slots_mutex_;
  std::condition_variable slots_cv_;
  std::size_t in_flight_ = 0;
};

// OpenAI-compatible text completions over HTTP(S):
// POST {base_url}/v1/completions with {model, prompt, max_tokens,
// temperature, stop}; the reply text is choices[0].text. Connection
// failures and 408/409/425/429/5xx are retried with exponential backoff.
class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(BackendDescriptor descriptor);

 protected:
  Completion do_complete(const CompletionRequest& request) override;

 private:
  std::string origin_;       // scheme://host[:port]
  std::string path_prefix_;  // path part of base_url without trailing '/'
};

enum class MatchKind { kExact, kPrefix, kSuffix };

struct ScriptEntry {
  MatchKind kind = MatchKind::kExact;
  std::string pattern;
  // Replayed in order, wrapping around.
  std::vector<std::string> completions;
  // When set, takes precedence over completions.
  std::function<std::string(std::string_view prompt)> responder;
  bool truncated = false;
};

// Deterministic scripted backend. Exact matchers win; otherwise the first
// prefix/suffix matcher in declaration order applies. Every call is logged.
class MockBackend final : public Backend {
 public:
  MockBackend(BackendDescriptor descriptor, std::vector<ScriptEntry> entries);

  std::vector<std::string> calls() const;
  std::size_t call_count() const;
  bool order_sensitive() const override { return true; }

 protected:
  Completion do_complete(const CompletionRequest& request) override;

 private:
  struct Slot {
    ScriptEntry entry;
    std::size_t next = 0;
  };
  mutable std::mutex mutex_;
  std::vector<Slot> slots_;
  std::vector<std::string> calls_;
};

// Throws DataError on a duplicate (kind, pattern) pair or an entry with
// neither completions nor a responder.
std::shared_ptr<MockBackend> script_mock(std::string name, std::vector<ScriptEntry> entries,
                                         bool instructed = false);

// Builds the backend a descriptor names. Mock descriptors get the given
// script (empty means every call misses).
std::shared_ptr<Backend> make_backend(const BackendDescriptor& descriptor,
                                      std::vector<ScriptEntry> script = {});

}  // namespace einst
