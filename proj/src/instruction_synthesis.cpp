#include "einst/instruction_synthesis.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "einst/error.hpp"
#include "einst/prompting.hpp"
#include "einst/text.hpp"

namespace einst {

void NoveltyIndex::add(std::string_view instruction) { entries_.push_back(tokenize(instruction)); }

double NoveltyIndex::max_f1(const TokenSeq& candidate) const {
  double best = 0.0;
  for (const auto& e : entries_) best = std::max(best, rouge_l(candidate, e).f1);
  return best;
}

bool NoveltyIndex::is_novel(std::string_view candidate) const {
  if (trim(candidate).empty()) throw DataError("novelty check: candidate is blank");
  const auto tokens = tokenize(candidate);
  for (const auto& e : entries_) {
    if (!(rouge_l(tokens, e).f1 < kNoveltyThreshold)) return false;
  }
  return true;
}

bool is_novel(std::string_view candidate, std::span<const std::string> existing) {
  NoveltyIndex index;
  for (const auto& e : existing) index.add(e);
  return index.is_novel(candidate);
}

std::string extract_instruction(std::string_view completion) {
  const auto lines = split_lines(cut_at(completion, protocol::kEndOfSample));
  std::string out;
  bool started = false;
  for (auto line : lines) {
    const auto t = trim(line);
    if (!started) {
      if (t.empty()) continue;  // leading blank lines
      started = true;
      auto first = t;
      if (starts_with_ci(first, protocol::kInstructionLabel)) {
        first.remove_prefix(protocol::kInstructionLabel.size());
      }
      out += first;
      continue;
    }
    if (t.empty() || starts_with_ci(t, protocol::kInstructionLabel)) break;
    out += '\n';
    out += line;
  }
  return std::string(trim(out));
}

InstructionSet generate_instructions(Backend& backend, const SeedPool& pool, TaskType type,
                                     std::size_t target, Rng& rng,
                                     const InstructionGenOptions& options,
                                     std::span<const std::string> prior) {
  if (target < 1) throw DataError("generate_instructions: target must be >= 1");
  const std::size_t budget = options.attempt_budget > 0 ? options.attempt_budget : 10 * target;

  NoveltyIndex index;
  for (const auto* task : pool.all()) index.add(task->instruction);
  for (const auto& p : prior) index.add(p);

  InstructionSet result;
  std::vector<std::string> synthetic;  // accepted texts, fed back as demos

  while (result.accepted.size() < target && result.attempts < budget) {
    const std::size_t batch =
        std::min({backend.descriptor().parallelism, budget - result.attempts,
                  target - result.accepted.size()});
    std::vector<CompletionRequest> requests;
    requests.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i) {
      const auto prompt = build_instruction_prompt(pool, synthetic, type, rng);
      CompletionRequest req;
      req.prompt = prompt.render();
      req.max_tokens = options.max_tokens;
      req.temperature = options.temperature;
      req.stop = prompt.stop_sequence;
      requests.push_back(std::move(req));
    }
    const auto completions = backend.complete_all(requests);
    result.attempts += batch;

    for (const auto& c : completions) {
      if (result.accepted.size() >= target) break;
      auto candidate = extract_instruction(c.text);
      // A candidate without a single word token cannot be an instruction.
      if (tokenize(candidate).empty() || !index.is_novel(candidate)) {
        ++result.rejected_count;
        continue;
      }
      index.add(candidate);
      synthetic.push_back(candidate);
      result.accepted.push_back({std::move(candidate), type, backend.name()});
    }
  }
  result.partial = result.accepted.size() < target;
  spdlog::info("[{}] type {} instructions: {} accepted, {} rejected, {} attempts{}",
               backend.name(), to_string(type), result.accepted.size(), result.rejected_count,
               result.attempts, result.partial ? " (partial)" : "");
  return result;
}

}  // namespace einst
