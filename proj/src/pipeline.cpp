#include "einst/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

#include "einst/consensus.hpp"
#include "einst/dataset_store.hpp"
#include "einst/error.hpp"
#include "einst/hash.hpp"
#include "einst/instance_synthesis.hpp"
#include "einst/instruction_synthesis.hpp"
#include "einst/jsonl.hpp"
#include "einst/rng.hpp"

namespace einst {

std::string manifest_name(std::string_view stage) {
  return std::string(stage) + ".manifest.json";
}

namespace {

using nlohmann::json;

// Rng stream ids per stage, derived from the run seed.
constexpr std::uint64_t kStreamInstructionsA = 1;
constexpr std::uint64_t kStreamInstructionsB = 2;
constexpr std::uint64_t kStreamInstances = 3;
constexpr std::uint64_t kStreamEnsemble = 4;

constexpr std::string_view kStageInstructions = "gen-instructions";
constexpr std::string_view kStageInstances = "gen-instances";
constexpr std::string_view kStageEnsemble = "ensemble";

// Runs fn(i) for every i < n on up to `workers` threads. If several calls
// throw, the one with the lowest index is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn fn) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string make_id(TaskType type, std::size_t ordinal) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%05zu", std::string(to_string(type)).c_str(), ordinal);
  return buf;
}

std::string string_field(const json& rec, const char* name, const std::string& where) {
  auto it = rec.find(name);
  if (it == rec.end() || !it->is_string()) {
    throw DataError(where + ": missing or non-string field '" + name + "'");
  }
  return it->get<std::string>();
}

std::size_t count_at(const json& counts, const char* type, const char* key) {
  try {
    return counts.at(type).at(key).get<std::size_t>();
  } catch (const json::exception&) {
    throw StageInputError(std::string("manifest counts lack ") + type + "." + key);
  }
}

json read_manifest(const std::filesystem::path& out_dir, std::string_view stage) {
  const auto file = out_dir / manifest_name(stage);
  if (!std::filesystem::exists(file)) {
    throw StageInputError(file.string() + " not found; run " + std::string(stage) + " first");
  }
  try {
    return json::parse(jsonl::read_file(file));
  } catch (const json::parse_error& e) {
    throw StageInputError(file.string() + ": unreadable manifest: " + e.what());
  }
}

}  // namespace

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {
  for (const auto& b : config_.backends) {
    backends_[b.descriptor.name] = make_backend(b.descriptor, b.script);
  }
}

Pipeline::Pipeline(PipelineConfig config, std::map<std::string, std::shared_ptr<Backend>> backends)
    : config_(std::move(config)), backends_(std::move(backends)) {}

std::filesystem::path Pipeline::path(std::string_view artifact) const {
  return config_.out_dir / std::string(artifact);
}

Backend& Pipeline::backend(const std::string& name) {
  auto it = backends_.find(name);
  if (it == backends_.end() || !it->second) {
    throw ConfigError("roles: no backend named '" + name + "'");
  }
  return *it->second;
}

const SeedPool& Pipeline::seeds() {
  if (!seeds_) {
    if (config_.seed_path.empty()) throw ConfigError("seed_path: required");
    seeds_ = std::make_unique<SeedPool>(load_seed_tasks(config_.seed_path));
  }
  return *seeds_;
}

json Pipeline::backend_info(std::initializer_list<std::string> names) const {
  json out = json::array();
  for (const auto& name : names) {
    auto it = backends_.find(name);
    if (it == backends_.end()) continue;
    const auto& d = it->second->descriptor();
    out.push_back({{"name", d.name},
                   {"kind", to_string(d.kind)},
                   {"model_id", d.model_id},
                   {"base_url", d.base_url ? json(*d.base_url) : json(nullptr)},
                   {"instructed", d.instructed}});
  }
  return out;
}

json Pipeline::checked_input(std::string_view producer, std::string_view artifact) const {
  const auto manifest = read_manifest(config_.out_dir, producer);
  const auto file = path(artifact);
  if (!std::filesystem::exists(file)) {
    throw StageInputError(file.string() + " not found; run " + std::string(producer) + " first");
  }
  std::string expected;
  for (const auto& out : manifest.value("outputs", json::array())) {
    if (out.value("path", "") == artifact) expected = out.value("sha256", "");
  }
  if (expected.empty()) {
    throw StageInputError(manifest_name(producer) + " does not list " + std::string(artifact));
  }
  const auto actual = sha256_file(file);
  if (actual != expected) {
    throw StageInputError(file.string() + " changed since " + std::string(producer) +
                          " wrote it (sha256 " + actual + ", manifest " + expected + ")");
  }
  if (manifest.value("config_hash", "") != config_.hash()) {
    spdlog::warn("{} was produced under a different config", artifact);
  }
  return {{"path", artifact}, {"sha256", actual}};
}

json Pipeline::write_manifest(std::string_view stage, json inputs,
                              std::initializer_list<std::string_view> outputs, json backends,
                              json counts) const {
  json outs = json::array();
  for (auto name : outputs) outs.push_back({{"path", name}, {"sha256", sha256_file(path(name))}});
  json manifest = {{"stage", stage},
                   {"config_hash", config_.hash()},
                   {"rng_seed", config_.rng_seed},
                   {"backends", std::move(backends)},
                   {"inputs", std::move(inputs)},
                   {"outputs", std::move(outs)},
                   {"counts", std::move(counts)}};
  jsonl::write_file(path(manifest_name(stage)), manifest.dump(2) + "\n");
  return manifest;
}

json Pipeline::gen_instructions() {
  config_.validate(false);
  const auto& pool = seeds();
  auto& generator = backend(config_.roles.generator);
  const Rng root(config_.rng_seed);

  std::vector<json> records;
  json counts = json::object();
  std::vector<std::string> prior;
  for (TaskType type : {TaskType::A, TaskType::B}) {
    const std::size_t target = type == TaskType::A ? config_.target_a : config_.target_b;
    Rng rng = root.derive(type == TaskType::A ? kStreamInstructionsA : kStreamInstructionsB);
    InstructionGenOptions opts;
    opts.attempt_budget = config_.attempt_budget_factor * target;
    opts.max_tokens = config_.max_tokens;
    opts.temperature = config_.generation_temperature;
    InstructionSet set;
    if (target > 0) set = generate_instructions(generator, pool, type, target, rng, opts, prior);
    if (set.partial) {
      spdlog::warn("type {}: budget spent with {} of {} instructions", to_string(type),
                   set.accepted.size(), target);
    }
    for (std::size_t i = 0; i < set.accepted.size(); ++i) {
      const auto& a = set.accepted[i];
      records.push_back({{"id", make_id(type, i + 1)},
                         {"instruction", a.text},
                         {"task_type", to_string(type)},
                         {"generator", a.backend}});
      prior.push_back(a.text);
    }
    counts[std::string(to_string(type))] = {{"target", target},
                                            {"accepted", set.accepted.size()},
                                            {"rejected", set.rejected_count},
                                            {"attempts", set.attempts},
                                            {"partial", set.partial}};
  }
  jsonl::write_records(path(artifacts::kInstructions), records);
  json inputs = json::array(
      {{{"path", config_.seed_path.string()}, {"sha256", sha256_file(config_.seed_path)}}});
  return write_manifest(kStageInstructions, std::move(inputs), {artifacts::kInstructions},
                        backend_info({config_.roles.generator}), std::move(counts));
}

json Pipeline::gen_instances() {
  config_.validate(false);
  json inputs = json::array({checked_input(kStageInstructions, artifacts::kInstructions)});
  const auto& pool = seeds();
  auto& generator = backend(config_.roles.generator);

  struct Item {
    std::string id;
    std::string instruction;
    TaskType type;
  };
  std::vector<Item> items;
  const auto file = path(artifacts::kInstructions);
  jsonl::for_each_record(file, [&](const json& rec, std::size_t line) {
    const auto where = file.string() + ":" + std::to_string(line);
    items.push_back({string_field(rec, "id", where), string_field(rec, "instruction", where),
                     parse_task_type(string_field(rec, "task_type", where))});
  });

  const Rng root = Rng(config_.rng_seed).derive(kStreamInstances);
  InstanceGenOptions opts{config_.max_tokens, config_.generation_temperature};
  std::vector<InstanceResult> results(items.size(), RejectionReason::kEmptyField);
  const std::size_t workers =
      generator.order_sensitive() ? 1 : generator.descriptor().parallelism;
  parallel_for(items.size(), workers, [&](std::size_t i) {
    Rng rng = root.derive(i);
    results[i] = synthesize_instance(generator, items[i].instruction, items[i].type, pool, rng, opts);
  });

  std::vector<json> valid;
  std::vector<json> rejected;
  json counts = json::object();
  for (TaskType type : {TaskType::A, TaskType::B}) {
    counts[std::string(to_string(type))] = {
        {"instructions", 0}, {"valid", 0}, {"rejected", json::object()}};
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto& c = counts[std::string(to_string(items[i].type))];
    c["instructions"] = c["instructions"].get<std::size_t>() + 1;
    if (const auto* inst = std::get_if<ParsedInstance>(&results[i])) {
      c["valid"] = c["valid"].get<std::size_t>() + 1;
      valid.push_back({{"id", items[i].id},
                       {"instruction", items[i].instruction},
                       {"input", inst->input ? json(*inst->input) : json(nullptr)},
                       {"output", inst->output},
                       {"task_type", to_string(items[i].type)},
                       {"generator", generator.name()}});
    } else {
      const auto reason = std::string(to_string(std::get<RejectionReason>(results[i])));
      auto& r = c["rejected"][reason];
      r = r.is_null() ? 1 : r.get<std::size_t>() + 1;
      rejected.push_back({{"id", items[i].id}, {"reason", reason}});
    }
  }
  jsonl::write_records(path(artifacts::kInstances), valid);
  jsonl::write_records(path(artifacts::kRejections), rejected);
  spdlog::info("gen-instances: {} of {} instructions produced a valid instance", valid.size(),
               items.size());
  return write_manifest(kStageInstances, std::move(inputs),
                        {artifacts::kInstances, artifacts::kRejections},
                        backend_info({config_.roles.generator}), std::move(counts));
}

json Pipeline::ensemble() {
  config_.validate(true);
  json inputs = json::array({checked_input(kStageInstances, artifacts::kInstances)});
  const auto& pool = seeds();
  auto& aux1 = backend(config_.roles.aux1);
  auto& aux2 = backend(config_.roles.aux2);

  struct Item {
    std::string id;
    std::string instruction;
    std::optional<std::string> input;
    std::string output;
    TaskType type;
    std::string generator;
  };
  std::vector<Item> items;
  const auto file = path(artifacts::kInstances);
  jsonl::for_each_record(file, [&](const json& rec, std::size_t line) {
    const auto where = file.string() + ":" + std::to_string(line);
    Item item{string_field(rec, "id", where), string_field(rec, "instruction", where), {},
              string_field(rec, "output", where),
              parse_task_type(string_field(rec, "task_type", where)),
              string_field(rec, "generator", where)};
    if (auto it = rec.find("input"); it != rec.end() && it->is_string()) item.input = it->get<std::string>();
    items.push_back(std::move(item));
  });

  const Rng root = Rng(config_.rng_seed).derive(kStreamEnsemble);
  const OutputGenOptions opts{config_.max_tokens, config_.output_temperature};
  std::vector<CandidateOutputs> candidates(items.size());
  const bool ordered = aux1.order_sensitive() || aux2.order_sensitive();
  const std::size_t workers =
      ordered ? 1 : std::min(aux1.descriptor().parallelism, aux2.descriptor().parallelism);
  parallel_for(items.size(), workers, [&](std::size_t i) {
    Rng rng = root.derive(i);
    candidates[i] = gather_outputs(items[i].output, items[i].generator, items[i].instruction,
                                   items[i].input, aux1, aux2, pool, rng, opts);
  });

  DatasetStore store;
  std::vector<json> decisions;
  json counts = json::object();
  for (TaskType type : {TaskType::A, TaskType::B}) {
    counts[std::string(to_string(type))] = {{"valid", 0}, {"ensembled", 0}};
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto decision = ensemble_select(candidates[i], config_.threshold);
    auto& c = counts[std::string(to_string(items[i].type))];
    c["valid"] = c["valid"].get<std::size_t>() + 1;
    decisions.push_back({{"id", items[i].id},
                         {"pair_scores", decision.pair_scores},
                         {"min_score", decision.min_score},
                         {"selected_index", decision.selected_index
                                                ? json(*decision.selected_index)
                                                : json(nullptr)}});
    if (!decision.selected) continue;
    c["ensembled"] = c["ensembled"].get<std::size_t>() + 1;
    store.add_example(make_example(items[i].id, items[i].instruction, items[i].input,
                                   items[i].generator, candidates[i], decision));
  }
  jsonl::write_records(path(artifacts::kDecisions), decisions);
  store.write_dataset(path(artifacts::kDataset), config_.include_seeds, pool);
  spdlog::info("ensemble: kept {} of {} instances", store.size(), items.size());
  dataset_ = std::move(store);
  counts["seeds_included"] = config_.include_seeds ? pool.size() : std::size_t{0};
  return write_manifest(kStageEnsemble, std::move(inputs),
                        {artifacts::kDataset, artifacts::kDecisions},
                        backend_info({config_.roles.aux1, config_.roles.aux2}), std::move(counts));
}

json run_stats(const std::filesystem::path& out_dir) {
  const auto instructions = read_manifest(out_dir, kStageInstructions).at("counts");
  const auto instances = read_manifest(out_dir, kStageInstances).at("counts");
  const auto ensembled = read_manifest(out_dir, kStageEnsemble).at("counts");

  std::vector<std::pair<std::string, PipelineStats>> rows;
  std::size_t ti = 0, tv = 0, te = 0;
  for (const char* type : {"A", "B"}) {
    const auto i = count_at(instructions, type, "accepted");
    const auto v = count_at(instances, type, "valid");
    const auto e = count_at(ensembled, type, "ensembled");
    rows.emplace_back(std::string("type ") + type, compute_stats(i, v, e));
    ti += i;
    tv += v;
    te += e;
  }
  rows.emplace_back("total", compute_stats(ti, tv, te));

  json doc = json::object();
  for (const auto& [label, s] : rows) doc[label] = s.to_json();
  jsonl::write_file(out_dir / artifacts::kStatsJson, doc.dump(2) + "\n");
  jsonl::write_file(out_dir / artifacts::kStatsText, format_stats_table(rows));
  return doc;
}

json Pipeline::stats() { return run_stats(config_.out_dir); }

json Pipeline::build() {
  config_.validate(true);
  gen_instructions();
  gen_instances();
  ensemble();
  return stats();
}

}  // namespace einst
