#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "einst/lm_gateway.hpp"
#include "einst/rng.hpp"
#include "einst/seed_corpus.hpp"

namespace einst {

inline constexpr double kDefaultConsensusThreshold = 0.01;

// Outputs for one task: index 0 from the model that produced the instance,
// 1 and 2 from the auxiliary models.
struct CandidateOutputs {
  std::array<std::string, 3> outputs;
  std::array<std::string, 3> sources;
};

// Pair order used for scoring and tie-breaking: (1,2), (1,3), (2,3).
inline constexpr std::array<std::array<std::size_t, 2>, 3> kPairs{{{0, 1}, {0, 2}, {1, 2}}};

struct EnsembleDecision {
  std::optional<std::string> selected;
  // 1-based, present iff selected is.
  std::optional<int> selected_index;
  std::array<double, 3> pair_scores{};
  double min_score = 0.0;
  double threshold = kDefaultConsensusThreshold;
};

// Greedy Rouge-L consensus over three outputs. Scores the three pairs; if
// the lowest score is strictly above threshold, returns the first element
// of the highest-scoring pair (earliest pair on ties). Otherwise nothing is
// selected and the task is dropped. Throws DataError on a negative
// threshold.
EnsembleDecision ensemble_select(const CandidateOutputs& candidates, double threshold);

struct OutputGenOptions {
  int max_tokens = 512;
  double temperature = 0.0;
};

// Asks both auxiliary backends for the task's output (zero-shot for
// instruction-tuned backends, few-shot otherwise) and packs the answers
// with primary_output. Both prompts are drawn from rng before the two
// requests go out concurrently. An empty reply stays an empty candidate.
CandidateOutputs gather_outputs(std::string_view primary_output, std::string_view primary_source,
                                std::string_view instruction,
                                const std::optional<std::string>& input, Backend& aux1,
                                Backend& aux2, const SeedPool& pool, Rng& rng,
                                const OutputGenOptions& options = {});

// Cleans an auxiliary completion: text before the end-of-sample marker and
// before any following "instruction:" line, trimmed.
std::string clean_output(std::string_view completion);

}  // namespace einst
