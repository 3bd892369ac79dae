#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "einst/rng.hpp"
#include "einst/seed_corpus.hpp"

namespace einst {

// Prompt text protocol. Parsers and stop handling depend on these exact
// strings.
namespace protocol {
inline constexpr std::string_view kInstructionLabel = "instruction:";
inline constexpr std::string_view kInputLabel = "input:";
inline constexpr std::string_view kOutputLabel = "output:";
inline constexpr std::string_view kEndOfSample = "|EoS|";
inline constexpr std::string_view kDemoSeparator = "\n\n";

inline constexpr std::string_view kInstanceHeaderA =
    "Generate examples for the following instructions. The instruction requires input and "
    "output instances. And you have to generate both input and output.";
inline constexpr std::string_view kInstanceHeaderB =
    "Generate examples for the instructions. The instruction does not require input and "
    "generate the output directly.";

inline constexpr std::string_view kInstructionHeaderA =
    "Come up with new instructions. Each instruction describes a task that needs an input "
    "to be carried out.";
inline constexpr std::string_view kInstructionHeaderB =
    "Come up with new instructions. Each instruction describes a task that can be answered "
    "directly, without any input.";
}  // namespace protocol

enum class Stage { kInstructionGen, kInstanceGen, kOutputGen };

std::string_view to_string(Stage stage);

struct PromptPlan {
  Stage stage;
  TaskType type;
  std::size_t seed_demos;
  std::size_t synthetic_demos;
};

// Demonstration counts per stage and type:
//   instruction_gen  A: 20 seed + 4 synthetic   B: 8 seed + 2 synthetic
//   instance_gen     A: 18                      B: 15
//   output_gen       same as instance_gen for vanilla models, 0 when the
//                    model is instruction tuned.
PromptPlan plan_for(Stage stage, TaskType type, bool instructed = false);

struct Prompt {
  std::string header;
  std::vector<std::string> demos;
  std::string cue;
  std::string stop_sequence{protocol::kEndOfSample};
  // How many of demos came from previously generated instructions.
  std::size_t synthetic_count = 0;

  // header, demos and cue joined by one blank line; empty header skipped.
  std::string render() const;
};

// "instruction: ...\n|EoS|"
std::string render_instruction_demo(std::string_view instruction);
// "instruction: ...\ninput: ...\noutput: ...\n|EoS|" (type A) or the same
// without the input line (type B).
std::string render_task_demo(const SeedTask& task);
// The text a model sees right before it generates an instance: everything
// of render_task_demo up to and including "input:" (A) or "output:" (B).
std::string instance_cue(std::string_view instruction, TaskType type);

// Instruction generation prompt. Seed demos come from the pool; synthetic
// slots are filled from previously accepted instructions of the same type
// and backfilled with extra seeds when there are not enough of them. The
// combined demo list is shuffled. Throws DataError if the pool is too small.
Prompt build_instruction_prompt(const SeedPool& pool,
                                std::span<const std::string> synthetic_instructions,
                                TaskType type, Rng& rng);

Prompt build_instance_prompt(std::string_view instruction, const SeedPool& pool,
                             TaskType type, Rng& rng);

// Prompt for an auxiliary model to produce the output of a generated task.
// Zero-shot for instruction-tuned models, few-shot with instance-style demos
// of the matching type otherwise. The task type follows input presence.
Prompt build_output_prompt(std::string_view instruction,
                           const std::optional<std::string>& input, bool instructed_model,
                           const SeedPool& pool, Rng& rng);

}  // namespace einst
