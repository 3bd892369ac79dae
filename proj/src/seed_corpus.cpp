#include "einst/seed_corpus.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>
#include <utility>

#include "einst/error.hpp"
#include "einst/jsonl.hpp"
#include "einst/text.hpp"

namespace einst {

std::string_view to_string(TaskType type) { return type == TaskType::A ? "A" : "B"; }

TaskType parse_task_type(std::string_view text) {
  if (text == "A" || text == "a") return TaskType::A;
  if (text == "B" || text == "b") return TaskType::B;
  throw DataError("unknown task type '" + std::string(text) + "'");
}

SeedTask normalize_task(SeedTask task) {
  task.instruction = std::string(trim(task.instruction));
  task.output = std::string(trim(task.output));
  if (task.input) {
    auto trimmed = trim(*task.input);
    if (trimmed.empty()) {
      task.input.reset();
    } else {
      task.input = std::string(trimmed);
    }
  }
  if (task.instruction.empty()) throw DataError("task " + task.id + ": field 'instruction' is empty");
  if (task.output.empty()) throw DataError("task " + task.id + ": field 'output' is empty");
  return task;
}

SeedPool::SeedPool(std::vector<SeedTask> tasks) {
  std::unordered_set<std::string> ids;
  for (auto& t : tasks) {
    t = normalize_task(std::move(t));
    if (!ids.insert(t.id).second) throw DataError("duplicate task id '" + t.id + "'");
    (t.input ? type_a_ : type_b_).push_back(std::move(t));
  }
}

std::vector<const SeedTask*> SeedPool::all() const {
  std::vector<const SeedTask*> out;
  out.reserve(size());
  for (const auto& t : type_a_) out.push_back(&t);
  for (const auto& t : type_b_) out.push_back(&t);
  return out;
}

namespace {

std::string location(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

std::string required_string(const nlohmann::json& obj, const char* field,
                            const std::string& where) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) {
    throw DataError(where + ": missing field '" + field + "'");
  }
  if (!it->is_string()) throw DataError(where + ": field '" + field + "' is not a string");
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const nlohmann::json& obj, const char* field,
                                           const std::string& where) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw DataError(where + ": field '" + field + "' is not a string");
  return it->get<std::string>();
}

SeedTask parse_record(const nlohmann::json& rec, const std::string& where, std::size_t line) {
  SeedTask task;
  if (auto it = rec.find("id"); it != rec.end() && !it->is_null()) {
    if (it->is_string()) {
      task.id = it->get<std::string>();
    } else if (it->is_number_integer()) {
      task.id = std::to_string(it->get<long long>());
    } else {
      throw DataError(where + ": field 'id' is not a string");
    }
  } else {
    task.id = "line-" + std::to_string(line);
  }
  task.instruction = required_string(rec, "instruction", where);

  if (auto it = rec.find("instances"); it != rec.end()) {
    if (!it->is_array() || it->empty() || !(*it)[0].is_object()) {
      throw DataError(where + ": field 'instances' must be a nonempty array of objects");
    }
    const auto& first = (*it)[0];
    task.input = optional_string(first, "input", where + " instances[0]");
    task.output = required_string(first, "output", where + " instances[0]");
  } else {
    task.input = optional_string(rec, "input", where);
    task.output = required_string(rec, "output", where);
  }

  if (auto gen = optional_string(rec, "generator", where); gen && *gen != "seed") {
    task.origin = Origin::kSynthetic;
  }

  try {
    return normalize_task(std::move(task));
  } catch (const DataError& e) {
    throw DataError(where + ": " + e.what());
  }
}

}  // namespace

SeedPool load_seed_tasks(const std::filesystem::path& path) {
  std::vector<SeedTask> tasks;
  std::unordered_set<std::string> ids;
  jsonl::for_each_record(path, [&](const nlohmann::json& rec, std::size_t line) {
    const auto where = location(path, line);
    auto task = parse_record(rec, where, line);
    if (!ids.insert(task.id).second) throw DataError(where + ": duplicate id '" + task.id + "'");
    tasks.push_back(std::move(task));
  });
  return SeedPool(std::move(tasks));
}

std::vector<SeedTask> sample_demos(const SeedPool& pool, TaskType type, std::size_t n,
                                   Rng& rng) {
  const auto& source = pool.of_type(type);
  if (n > source.size()) {
    throw DataError("requested " + std::to_string(n) + " type " + std::string(to_string(type)) +
                    " demonstrations but the pool has " + std::to_string(source.size()));
  }
  std::vector<SeedTask> out;
  out.reserve(n);
  for (auto i : rng.sample_indices(source.size(), n)) out.push_back(source[i]);
  return out;
}

}  // namespace einst
