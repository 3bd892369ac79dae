#include "einst/lm_gateway.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <set>
#include <thread>
#include <utility>

#include <spdlog/spdlog.h>

#include "httplib.h"
#include "json.hpp"

#include "einst/text.hpp"

namespace einst {

std::string_view to_string(BackendKind kind) {
  return kind == BackendKind::kHttp ? "http" : "mock";
}

void CompletionRequest::validate() const {
  if (max_tokens < 1) throw DataError("completion request: max_tokens must be >= 1");
  if (!(temperature >= 0.0)) throw DataError("completion request: temperature must be >= 0");
}

void BackendDescriptor::validate() const {
  if (name.empty()) throw ConfigError("backend: name must be nonempty");
  if (kind == BackendKind::kHttp && (!base_url || base_url->empty())) {
    throw ConfigError("backend '" + name + "': http backends need base_url");
  }
  if (parallelism < 1) throw ConfigError("backend '" + name + "': parallelism must be >= 1");
  if (max_retries < 0) throw ConfigError("backend '" + name + "': max_retries must be >= 0");
}

// ---------------------------------------------------------------------------
// Backend

Backend::Backend(BackendDescriptor descriptor) : descriptor_(std::move(descriptor)) {
  descriptor_.validate();
}

Completion Backend::complete(const CompletionRequest& request) {
  request.validate();
  {
    std::unique_lock lock(slots_mutex_);
    slots_cv_.wait(lock, [&] { return in_flight_ < descriptor_.parallelism; });
    ++in_flight_;
  }
  struct Release {
    Backend* self;
    ~Release() {
      {
        std::lock_guard lock(self->slots_mutex_);
        --self->in_flight_;
      }
      self->slots_cv_.notify_one();
    }
  } release{this};

  Completion result = do_complete(request);
  if (request.stop) result.text = std::string(cut_at(result.text, *request.stop));
  return result;
}

std::vector<Completion> Backend::complete_all(std::span<const CompletionRequest> requests) {
  std::vector<Completion> results(requests.size());
  const std::size_t workers = std::min(descriptor_.parallelism, requests.size());
  if (order_sensitive() || workers <= 1) {
    for (std::size_t i = 0; i < requests.size(); ++i) results[i] = complete(requests[i]);
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < requests.size(); i = next++) {
        try {
          results[i] = complete(requests[i]);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = requests.size();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return results;
}

// ---------------------------------------------------------------------------
// HttpBackend

namespace {

bool is_retryable_status(int status) {
  return status == 408 || status == 409 || status == 425 || status == 429 || status >= 500;
}

std::string excerpt(const std::string& body) {
  constexpr std::size_t kMax = 300;
  return body.size() <= kMax ? body : body.substr(0, kMax) + "...";
}

}  // namespace

HttpBackend::HttpBackend(BackendDescriptor descriptor) : Backend(std::move(descriptor)) {
  const std::string& url = *this->descriptor().base_url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("backend '" + name() + "': base_url needs a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

Completion HttpBackend::do_complete(const CompletionRequest& request) {
  const auto& desc = descriptor();
  nlohmann::json body = {
      {"model", request.model_id.empty() ? desc.model_id : request.model_id},
      {"prompt", request.prompt},
      {"max_tokens", request.max_tokens},
      {"temperature", request.temperature},
  };
  if (request.stop) body["stop"] = *request.stop;
  const std::string payload = body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);

  httplib::Headers headers;
  if (!desc.api_key_env.empty()) {
    if (const char* key = std::getenv(desc.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  const std::string path = path_prefix_ + "/v1/completions";
  const int max_attempts = desc.max_retries + 1;
  std::string last_problem;
  int last_status = 0;
  std::string last_body;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    if (attempt > 1) {
      const auto delay = desc.backoff_base * (1LL << (attempt - 2));
      spdlog::warn("[{}] retry {}/{} after {} ms: {}", desc.name, attempt - 1, desc.max_retries,
                   delay.count(), last_problem);
      std::this_thread::sleep_for(delay);
    }

    httplib::Client client(origin_);
    client.set_connection_timeout(desc.timeout);
    client.set_read_timeout(desc.timeout);
    auto res = client.Post(path, headers, payload, "application/json");

    if (!res) {
      last_problem = "transport: " + httplib::to_string(res.error());
      last_status = 0;
      continue;
    }
    spdlog::debug("[{}] attempt {} -> HTTP {}", desc.name, attempt, res->status);
    if (res->status >= 200 && res->status < 300) {
      nlohmann::json reply;
      try {
        reply = nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::parse_error&) {
        throw ProtocolError(res->status, excerpt(res->body),
                            "backend '" + desc.name + "': response is not JSON");
      }
      const auto choices = reply.find("choices");
      if (choices == reply.end() || !choices->is_array() || choices->empty() ||
          !(*choices)[0].contains("text") || !(*choices)[0]["text"].is_string()) {
        throw ProtocolError(res->status, excerpt(res->body),
                            "backend '" + desc.name + "': response has no choices[0].text");
      }
      const auto& choice = (*choices)[0];
      Completion out;
      out.text = choice["text"].get<std::string>();
      out.truncated = choice.contains("finish_reason") && choice["finish_reason"].is_string() &&
                      choice["finish_reason"].get<std::string>() == "length";
      out.attempts = attempt;
      return out;
    }
    if (!is_retryable_status(res->status)) {
      throw ProtocolError(res->status, excerpt(res->body),
                          "backend '" + desc.name + "': HTTP " + std::to_string(res->status) +
                              ": " + excerpt(res->body));
    }
    last_problem = "HTTP " + std::to_string(res->status);
    last_status = res->status;
    last_body = excerpt(res->body);
  }
  if (last_status != 0) {
    throw ProtocolError(last_status, last_body,
                        "backend '" + desc.name + "': giving up after " +
                            std::to_string(max_attempts) + " attempts (" + last_problem + ")");
  }
  throw TransportError("backend '" + desc.name + "': giving up after " +
                       std::to_string(max_attempts) + " attempts (" + last_problem + ")");
}

// ---------------------------------------------------------------------------
// MockBackend

MockBackend::MockBackend(BackendDescriptor descriptor, std::vector<ScriptEntry> entries)
    : Backend(std::move(descriptor)) {
  std::set<std::pair<MatchKind, std::string>> seen;
  for (auto& e : entries) {
    if (!seen.emplace(e.kind, e.pattern).second) {
      throw DataError("mock '" + name() + "': duplicate matcher '" + e.pattern + "'");
    }
    if (e.completions.empty() && !e.responder) {
      throw DataError("mock '" + name() + "': matcher '" + e.pattern + "' has no completions");
    }
    slots_.push_back({std::move(e), 0});
  }
}

std::vector<std::string> MockBackend::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::size_t MockBackend::call_count() const {
  std::lock_guard lock(mutex_);
  return calls_.size();
}

Completion MockBackend::do_complete(const CompletionRequest& request) {
  std::lock_guard lock(mutex_);
  calls_.push_back(request.prompt);
  const std::string_view prompt = request.prompt;

  Slot* hit = nullptr;
  for (auto& s : slots_) {
    if (s.entry.kind == MatchKind::kExact && s.entry.pattern == prompt) {
      hit = &s;
      break;
    }
  }
  if (!hit) {
    for (auto& s : slots_) {
      const auto& p = s.entry.pattern;
      if ((s.entry.kind == MatchKind::kPrefix && prompt.starts_with(p)) ||
          (s.entry.kind == MatchKind::kSuffix && prompt.ends_with(p))) {
        hit = &s;
        break;
      }
    }
  }
  if (!hit) {
    const auto shown = prompt.size() > 120 ? std::string(prompt.substr(prompt.size() - 120))
                                           : std::string(prompt);
    throw ScriptMissError("mock '" + name() + "': no script entry matches prompt ending '" +
                          shown + "'");
  }

  Completion out;
  if (hit->entry.responder) {
    out.text = hit->entry.responder(prompt);
  } else {
    out.text = hit->entry.completions[hit->next % hit->entry.completions.size()];
    ++hit->next;
  }
  out.truncated = hit->entry.truncated;
  return out;
}

std::shared_ptr<MockBackend> script_mock(std::string name, std::vector<ScriptEntry> entries,
                                         bool instructed) {
  BackendDescriptor desc;
  desc.name = std::move(name);
  desc.kind = BackendKind::kMock;
  desc.instructed = instructed;
  desc.model_id = "mock";
  return std::make_shared<MockBackend>(std::move(desc), std::move(entries));
}

std::shared_ptr<Backend> make_backend(const BackendDescriptor& descriptor,
                                      std::vector<ScriptEntry> script) {
  if (descriptor.kind == BackendKind::kHttp) return std::make_shared<HttpBackend>(descriptor);
  return std::make_shared<MockBackend>(descriptor, std::move(script));
}

}  // namespace einst
