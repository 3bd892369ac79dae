#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "einst/consensus.hpp"
#include "einst/seed_corpus.hpp"
#include "json.hpp"

namespace einst {

// What the consensus step saw and decided for one example.
struct EnsembleSummary {
  std::array<std::string, 3> candidates;
  std::array<std::string, 3> sources;
  std::array<double, 3> pair_scores{};
  int selected_index = 1;
  double threshold = kDefaultConsensusThreshold;

  friend bool operator==(const EnsembleSummary&, const EnsembleSummary&) = default;
};

struct SyntheticExample {
  std::string id;
  std::string instruction;
  std::optional<std::string> input;
  std::string output;
  TaskType task_type = TaskType::B;
  // Backend that wrote the instruction and instance, or "seed".
  std::string generator;
  std::optional<EnsembleSummary> ensemble;

  friend bool operator==(const SyntheticExample&, const SyntheticExample&) = default;
};

// Builds an example from a selected consensus decision. Throws DataError
// if nothing was selected.
SyntheticExample make_example(std::string id, std::string instruction,
                              std::optional<std::string> input, std::string generator,
                              const CandidateOutputs& candidates,
                              const EnsembleDecision& decision);

// Seed task in dataset shape, generator "seed".
SyntheticExample seed_example(const SeedTask& task);

nlohmann::json to_json(const SyntheticExample& example);
// Throws DataError naming the offending field.
SyntheticExample example_from_json(const nlohmann::json& record);

// Throws DataError if the example breaks its invariants: nonempty
// instruction and output, task type matching input presence, and for
// ensembled examples an output equal to the selected candidate whose pair
// scores clear the threshold.
void validate_example(const SyntheticExample& example);

struct TypeBalance {
  std::size_t type_a = 0;
  std::size_t type_b = 0;
};

// Accepted examples in insertion order; single writer.
class DatasetStore {
 public:
  // Throws DataError on a duplicate id or an invalid example.
  void add_example(SyntheticExample example);

  const std::vector<SyntheticExample>& examples() const { return examples_; }
  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }
  TypeBalance type_balance() const;

  // One JSON object per line, sorted by id; seeds are added in the same
  // shape when include_seeds is set. Throws DataError if there would be
  // nothing to write or a seed id collides with an example id.
  void write_dataset(const std::filesystem::path& path, bool include_seeds,
                     const SeedPool& seeds) const;

 private:
  std::vector<SyntheticExample> examples_;
  std::unordered_set<std::string> ids_;
};

std::vector<SyntheticExample> read_dataset(const std::filesystem::path& path);

struct PipelineStats {
  std::size_t instructions = 0;
  std::size_t valid_instances = 0;
  std::size_t ensembled = 0;
  // round(100 * ensembled / valid_instances), halves rounded up; 0 when
  // there are no valid instances.
  int percent_ensembled = 0;

  // "49 (68%)"
  std::string ensembled_cell() const;
  nlohmann::json to_json() const;
};

// Throws DataError unless ensembled <= valid_instances <= instructions.
PipelineStats compute_stats(std::size_t instructions, std::size_t valid_instances,
                            std::size_t ensembled);

// Plain-text table with one row per label.
std::string format_stats_table(const std::vector<std::pair<std::string, PipelineStats>>& rows);

}  // namespace einst
