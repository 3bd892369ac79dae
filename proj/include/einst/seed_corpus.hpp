#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "einst/rng.hpp"

namespace einst {

// A = the instruction needs an input, B = it does not.
enum class TaskType { A, B };

std::string_view to_string(TaskType type);
// Accepts "A"/"B" (case-insensitive). Throws DataError otherwise.
TaskType parse_task_type(std::string_view text);

enum class Origin { kSeed, kSynthetic };

struct SeedTask {
  std::string id;
  std::string instruction;
  std::optional<std::string> input;
  std::string output;
  Origin origin = Origin::kSeed;

  TaskType type() const { return input ? TaskType::A : TaskType::B; }

  friend bool operator==(const SeedTask&, const SeedTask&) = default;
};

// Trims the fields, turns a blank input into an absent one, and checks that
// instruction and output are nonempty. Throws DataError naming the field.
SeedTask normalize_task(SeedTask task);

// Seed tasks split by category. Immutable once built.
class SeedPool {
 public:
  SeedPool() = default;
  // Categorizes each task by input presence. Throws DataError on duplicate
  // ids or on a task that fails normalize_task.
  explicit SeedPool(std::vector<SeedTask> tasks);

  const std::vector<SeedTask>& type_a() const { return type_a_; }
  const std::vector<SeedTask>& type_b() const { return type_b_; }
  const std::vector<SeedTask>& of_type(TaskType type) const {
    return type == TaskType::A ? type_a_ : type_b_;
  }
  std::size_t size() const { return type_a_.size() + type_b_.size(); }

  // Both categories, type A first, each in load order.
  std::vector<const SeedTask*> all() const;

 private:
  std::vector<SeedTask> type_a_;
  std::vector<SeedTask> type_b_;
};

// Reads a JSON Lines seed file. Each line is either a flat record
//   {"id"?, "instruction", "input"?, "output"}
// or the upstream shape
//   {"id", "instruction", "instances": [{"input", "output"}, ...]}
// in which case only the first instance is used. Unknown fields are ignored.
// Records with a "generator" field other than "seed" load as synthetic.
// Missing ids default to "line-<n>".
SeedPool load_seed_tasks(const std::filesystem::path& path);

// n distinct tasks of the given type, uniform without replacement.
// Throws DataError if n exceeds the number of tasks of that type.
std::vector<SeedTask> sample_demos(const SeedPool& pool, TaskType type,
                                   std::size_t n, Rng& rng);

}  // namespace einst
