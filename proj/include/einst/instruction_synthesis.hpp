#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "einst/lm_gateway.hpp"
#include "einst/metric.hpp"
#include "einst/rng.hpp"
#include "einst/seed_corpus.hpp"

namespace einst {

// A candidate is kept only if its Rouge-L F1 against every existing
// instruction is strictly below this.
inline constexpr double kNoveltyThreshold = 0.7;

// True iff max over existing of rouge_l(candidate, e).f1 < 0.7; true for an
// empty list. Throws DataError on a blank candidate.
bool is_novel(std::string_view candidate, std::span<const std::string> existing);

// Pre-tokenized instruction set for repeated novelty checks.
class NoveltyIndex {
 public:
  void add(std::string_view instruction);
  bool is_novel(std::string_view candidate) const;
  // Highest Rouge-L F1 of candidate against the index, 0 when empty.
  double max_f1(const TokenSeq& candidate) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<TokenSeq> entries_;
};

struct AcceptedInstruction {
  std::string text;
  TaskType type;
  std::string backend;

  friend bool operator==(const AcceptedInstruction&, const AcceptedInstruction&) = default;
};

struct InstructionSet {
  std::vector<AcceptedInstruction> accepted;
  std::size_t rejected_count = 0;
  std::size_t attempts = 0;
  // The attempt budget ran out before the target was reached.
  bool partial = false;
};

struct InstructionGenOptions {
  // Completion requests allowed; 0 means 10 x target.
  std::size_t attempt_budget = 0;
  int max_tokens = 512;
  double temperature = 0.7;
};

// Pulls one instruction out of a raw completion: text up to the stop
// marker, the first blank line, or the next "instruction:" line, with a
// leading "instruction:" label removed and whitespace trimmed.
std::string extract_instruction(std::string_view completion);

// Proposes instructions of one type until target are accepted or the
// budget is spent. Candidates are checked against every seed instruction
// (both types), everything in prior, and everything accepted so far.
// Requests go out in batches of the backend's parallelism; results are
// applied in request order.
InstructionSet generate_instructions(Backend& backend, const SeedPool& pool, TaskType type,
                                     std::size_t target, Rng& rng,
                                     const InstructionGenOptions& options = {},
                                     std::span<const std::string> prior = {});

}  // namespace einst
