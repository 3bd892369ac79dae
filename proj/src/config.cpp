#include "einst/config.hpp"

#include <set>

#include "einst/error.hpp"
#include "einst/hash.hpp"
#include "einst/jsonl.hpp"

namespace einst {

namespace {

using nlohmann::json;

// Typed lookup with the field path in error messages.
template <typename T>
T get_or(const json& obj, const std::string& path, const char* key, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + key + ": wrong type");
  }
}

template <typename T>
T get_required(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) throw ConfigError(path + key + ": required");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + key + ": wrong type");
  }
}

std::size_t get_count(const json& obj, const std::string& path, const char* key,
                      std::size_t fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_number_integer() || it->get<long long>() < 0) {
    throw ConfigError(path + key + ": must be a non-negative integer");
  }
  return it->get<std::size_t>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.empty() || path.is_absolute() || base.empty()) return path;
  return base / path;
}

MatchKind parse_match(const std::string& s, const std::string& path) {
  if (s == "exact") return MatchKind::kExact;
  if (s == "prefix") return MatchKind::kPrefix;
  if (s == "suffix") return MatchKind::kSuffix;
  throw ConfigError(path + "match: expected exact, prefix or suffix");
}

BackendConfig parse_backend(const json& b, const std::string& path, std::size_t parallelism,
                            int max_retries) {
  if (!b.is_object()) throw ConfigError(path + ": must be an object");
  const std::string p = path + ".";
  BackendConfig cfg;
  auto& d = cfg.descriptor;
  d.name = get_required<std::string>(b, p, "name");
  const auto kind = get_or<std::string>(b, p, "kind", "http");
  if (kind == "http") {
    d.kind = BackendKind::kHttp;
  } else if (kind == "mock") {
    d.kind = BackendKind::kMock;
  } else {
    throw ConfigError(p + "kind: expected http or mock");
  }
  if (auto url = get_or<std::string>(b, p, "base_url", ""); !url.empty()) d.base_url = url;
  d.model_id = get_or<std::string>(b, p, "model_id", d.kind == BackendKind::kMock ? "mock" : "");
  d.instructed = get_or<bool>(b, p, "instructed", false);
  d.parallelism = get_count(b, p, "parallelism", parallelism);
  d.max_retries = get_or<int>(b, p, "max_retries", max_retries);
  d.api_key_env = get_or<std::string>(b, p, "api_key_env", d.api_key_env);
  d.backoff_base = std::chrono::milliseconds(get_count(b, p, "backoff_ms", 500));
  d.timeout = std::chrono::milliseconds(get_count(b, p, "timeout_ms", 120000));

  if (auto it = b.find("script"); it != b.end() && !it->is_null()) {
    if (d.kind != BackendKind::kMock) throw ConfigError(p + "script: only mock backends take a script");
    if (!it->is_array()) throw ConfigError(p + "script: must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& e = (*it)[i];
      const std::string ep = p + "script[" + std::to_string(i) + "].";
      ScriptEntry entry;
      entry.kind = parse_match(get_or<std::string>(e, ep, "match", "exact"), ep);
      entry.pattern = get_or<std::string>(e, ep, "pattern", "");
      entry.completions = get_required<std::vector<std::string>>(e, ep, "completions");
      if (entry.completions.empty()) throw ConfigError(ep + "completions: must be nonempty");
      entry.truncated = get_or<bool>(e, ep, "truncated", false);
      cfg.script.push_back(std::move(entry));
    }
  }
  try {
    d.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return cfg;
}

}  // namespace

const BackendConfig& PipelineConfig::backend(std::string_view name) const {
  for (const auto& b : backends) {
    if (b.descriptor.name == name) return b;
  }
  throw ConfigError("no backend named '" + std::string(name) + "'");
}

std::string PipelineConfig::hash() const { return sha256_hex(document.dump()); }

void PipelineConfig::validate(bool need_aux) const {
  if (!(threshold >= 0.0)) throw ConfigError("threshold: must be >= 0");
  if (roles.generator.empty()) throw ConfigError("roles.generator: required");
  backend(roles.generator);
  if (need_aux) {
    if (roles.aux1.empty()) throw ConfigError("roles.aux1: required for ensembling");
    if (roles.aux2.empty()) throw ConfigError("roles.aux2: required for ensembling");
    backend(roles.aux1);
    backend(roles.aux2);
  }
  if (max_tokens < 1) throw ConfigError("max_tokens: must be >= 1");
  if (attempt_budget_factor < 1) throw ConfigError("attempt_budget_factor: must be >= 1");
  if (!(generation_temperature >= 0.0)) throw ConfigError("temperature.generation: must be >= 0");
  if (!(output_temperature >= 0.0)) throw ConfigError("temperature.output: must be >= 0");
}

void apply_override(json& document, std::string_view dotted_key, std::string_view value) {
  if (dotted_key.empty()) throw ConfigError("empty override key");
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = std::string(value);
  }
  json* node = &document;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted_key.find('.', start);
    const std::string part(dotted_key.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
    if (part.empty()) throw ConfigError("malformed override key '" + std::string(dotted_key) + "'");
    if (!node->is_object()) {
      throw ConfigError("override '" + std::string(dotted_key) + "': parent is not an object");
    }
    if (dot == std::string_view::npos) {
      (*node)[part] = std::move(parsed);
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

PipelineConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  static const std::set<std::string> kKnown = {
      "seed_path", "out_dir", "rng_seed", "threshold", "targets", "attempt_budget_factor",
      "parallelism", "max_retries", "max_tokens", "temperature", "include_seeds", "roles",
      "backends"};
  for (const auto& [key, _] : doc.items()) {
    if (!kKnown.count(key)) throw ConfigError(key + ": unknown key");
  }

  PipelineConfig cfg;
  cfg.document = doc;
  const std::string root;
  cfg.seed_path = resolve(base_dir, get_required<std::string>(doc, root, "seed_path"));
  cfg.out_dir = resolve(base_dir, get_or<std::string>(doc, root, "out_dir", "run"));
  cfg.rng_seed = get_or<std::uint64_t>(doc, root, "rng_seed", 42);
  cfg.threshold = get_or<double>(doc, root, "threshold", 0.01);
  if (auto it = doc.find("targets"); it != doc.end() && !it->is_null()) {
    cfg.target_a = get_count(*it, "targets.", "A", cfg.target_a);
    cfg.target_b = get_count(*it, "targets.", "B", cfg.target_b);
  }
  cfg.attempt_budget_factor = get_count(doc, root, "attempt_budget_factor", 10);
  cfg.parallelism = get_count(doc, root, "parallelism", 4);
  if (cfg.parallelism < 1) throw ConfigError("parallelism: must be >= 1");
  cfg.max_retries = get_or<int>(doc, root, "max_retries", 3);
  cfg.max_tokens = get_or<int>(doc, root, "max_tokens", 512);
  if (auto it = doc.find("temperature"); it != doc.end() && !it->is_null()) {
    cfg.generation_temperature = get_or<double>(*it, "temperature.", "generation", 0.7);
    cfg.output_temperature = get_or<double>(*it, "temperature.", "output", 0.0);
  }
  cfg.include_seeds = get_or<bool>(doc, root, "include_seeds", true);
  if (auto it = doc.find("roles"); it != doc.end() && !it->is_null()) {
    cfg.roles.generator = get_or<std::string>(*it, "roles.", "generator", "");
    cfg.roles.aux1 = get_or<std::string>(*it, "roles.", "aux1", "");
    cfg.roles.aux2 = get_or<std::string>(*it, "roles.", "aux2", "");
  }
  if (auto it = doc.find("backends"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) throw ConfigError("backends: must be an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < it->size(); ++i) {
      auto b = parse_backend((*it)[i], "backends[" + std::to_string(i) + "]", cfg.parallelism,
                             cfg.max_retries);
      if (!names.insert(b.descriptor.name).second) {
        throw ConfigError("backends[" + std::to_string(i) + "].name: duplicate '" +
                          b.descriptor.name + "'");
      }
      cfg.backends.push_back(std::move(b));
    }
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path,
                           const std::vector<std::pair<std::string, std::string>>& overrides) {
  json doc;
  try {
    doc = json::parse(jsonl::read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": invalid JSON: " + e.what());
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  for (const auto& [key, value] : overrides) apply_override(doc, key, value);
  return config_from_json(doc, path.parent_path());
}

}  // namespace einst
