#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "einst/lm_gateway.hpp"
#include "json.hpp"

namespace einst {

struct BackendConfig {
  BackendDescriptor descriptor;
  std::vector<ScriptEntry> script;  // mock backends only
};

struct RoleAssignment {
  std::string generator;
  std::string aux1;
  std::string aux2;
};

// Run configuration. Loaded from one JSON document:
//
//   {
//     "seed_path": "seed_tasks.jsonl",
//     "out_dir": "run",
//     "rng_seed": 42,
//     "threshold": 0.01,
//     "targets": {"A": 100, "B": 100},
//     "attempt_budget_factor": 10,
//     "parallelism": 4,
//     "max_retries": 3,
//     "max_tokens": 512,
//     "temperature": {"generation": 0.7, "output": 0.0},
//     "include_seeds": true,
//     "roles": {"generator": "falcon", "aux1": "flan-ul2", "aux2": "flan-t5"},
//     "backends": [
//       {"name": "falcon", "kind": "http", "base_url": "http://host:8000",
//        "model_id": "tiiuae/falcon-40b", "instructed": false,
//        "api_key_env": "OPENAI_API_KEY", "backoff_ms": 500, "timeout_ms": 120000},
//       {"name": "scripted", "kind": "mock", "instructed": true,
//        "script": [{"match": "prefix", "pattern": "instruction:",
//                    "completions": ["yes"], "truncated": false}]}
//     ]
//   }
//
// Backend "parallelism" and "max_retries" default to the top-level values.
// Relative paths resolve against the config file's directory.
struct PipelineConfig {
  std::filesystem::path seed_path;
  std::filesystem::path out_dir = "run";
  std::uint64_t rng_seed = 42;
  double threshold = 0.01;
  std::size_t target_a = 100;
  std::size_t target_b = 100;
  std::size_t attempt_budget_factor = 10;
  std::size_t parallelism = 4;
  int max_retries = 3;
  int max_tokens = 512;
  double generation_temperature = 0.7;
  double output_temperature = 0.0;
  bool include_seeds = true;
  RoleAssignment roles;
  std::vector<BackendConfig> backends;

  // The effective document after overrides, with sorted keys.
  nlohmann::json document;

  const BackendConfig& backend(std::string_view name) const;
  // Hex SHA-256 of the canonical document.
  std::string hash() const;
  // Throws ConfigError with the offending field path.
  void validate(bool need_aux) const;
};

// Sets a dotted key ("targets.A", "roles.generator") in the document.
// The value is parsed as JSON when possible and kept as a string otherwise.
void apply_override(nlohmann::json& document, std::string_view dotted_key,
                    std::string_view value);

PipelineConfig config_from_json(const nlohmann::json& document,
                                const std::filesystem::path& base_dir = {});

PipelineConfig load_config(const std::filesystem::path& path,
                           const std::vector<std::pair<std::string, std::string>>& overrides = {});

}  // namespace einst
