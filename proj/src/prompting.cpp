#include "einst/prompting.hpp"

#include <algorithm>
#include <utility>

#include "einst/error.hpp"
#include "einst/text.hpp"

namespace einst {

namespace {

void require_instruction(std::string_view instruction) {
  if (trim(instruction).empty()) throw DataError("instruction must be nonempty");
  if (instruction.find(protocol::kEndOfSample) != std::string_view::npos) {
    throw DataError("instruction contains the end-of-sample marker");
  }
}

std::string labelled(std::string_view label, std::string_view value) {
  std::string out(label);
  out += ' ';
  out += value;
  return out;
}

std::string_view instance_header(TaskType type) {
  return type == TaskType::A ? protocol::kInstanceHeaderA : protocol::kInstanceHeaderB;
}

std::vector<std::string> render_seed_demos(const SeedPool& pool, TaskType type, std::size_t n,
                                           Rng& rng) {
  std::vector<std::string> demos;
  demos.reserve(n);
  for (const auto& task : sample_demos(pool, type, n, rng)) demos.push_back(render_task_demo(task));
  return demos;
}

}  // namespace

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::kInstructionGen:
      return "instruction_gen";
    case Stage::kInstanceGen:
      return "instance_gen";
    case Stage::kOutputGen:
      return "output_gen";
  }
  return "?";
}

PromptPlan plan_for(Stage stage, TaskType type, bool instructed) {
  const bool a = type == TaskType::A;
  switch (stage) {
    case Stage::kInstructionGen:
      return {stage, type, a ? 20u : 8u, a ? 4u : 2u};
    case Stage::kInstanceGen:
      return {stage, type, a ? 18u : 15u, 0};
    case Stage::kOutputGen:
      if (instructed) return {stage, type, 0, 0};
      return {stage, type, a ? 18u : 15u, 0};
  }
  return {stage, type, 0, 0};
}

std::string Prompt::render() const {
  std::string out;
  auto append = [&](std::string_view part) {
    if (!out.empty()) out += protocol::kDemoSeparator;
    out += part;
  };
  if (!header.empty()) append(header);
  for (const auto& d : demos) append(d);
  append(cue);
  return out;
}

std::string render_instruction_demo(std::string_view instruction) {
  std::string out = labelled(protocol::kInstructionLabel, trim(instruction));
  out += '\n';
  out += protocol::kEndOfSample;
  return out;
}

std::string render_task_demo(const SeedTask& task) {
  std::string out = labelled(protocol::kInstructionLabel, task.instruction);
  if (task.input) {
    out += '\n';
    out += labelled(protocol::kInputLabel, *task.input);
  }
  out += '\n';
  out += labelled(protocol::kOutputLabel, task.output);
  out += '\n';
  out += protocol::kEndOfSample;
  return out;
}

std::string instance_cue(std::string_view instruction, TaskType type) {
  std::string out = labelled(protocol::kInstructionLabel, trim(instruction));
  out += '\n';
  out += type == TaskType::A ? protocol::kInputLabel : protocol::kOutputLabel;
  return out;
}

Prompt build_instruction_prompt(const SeedPool& pool,
                                std::span<const std::string> synthetic_instructions,
                                TaskType type, Rng& rng) {
  const auto plan = plan_for(Stage::kInstructionGen, type);
  const std::size_t synthetic_used = std::min(plan.synthetic_demos, synthetic_instructions.size());
  const std::size_t seeds_needed = plan.seed_demos + (plan.synthetic_demos - synthetic_used);

  Prompt prompt;
  prompt.header = type == TaskType::A ? protocol::kInstructionHeaderA : protocol::kInstructionHeaderB;
  for (const auto& task : sample_demos(pool, type, seeds_needed, rng)) {
    prompt.demos.push_back(render_instruction_demo(task.instruction));
  }
  for (auto i : rng.sample_indices(synthetic_instructions.size(), synthetic_used)) {
    prompt.demos.push_back(render_instruction_demo(synthetic_instructions[i]));
  }
  prompt.synthetic_count = synthetic_used;
  rng.shuffle(prompt.demos);
  prompt.cue = std::string(protocol::kInstructionLabel);
  return prompt;
}

Prompt build_instance_prompt(std::string_view instruction, const SeedPool& pool, TaskType type,
                             Rng& rng) {
  require_instruction(instruction);
  const auto plan = plan_for(Stage::kInstanceGen, type);
  Prompt prompt;
  prompt.header = std::string(instance_header(type));
  prompt.demos = render_seed_demos(pool, type, plan.seed_demos, rng);
  prompt.cue = instance_cue(instruction, type);
  return prompt;
}

Prompt build_output_prompt(std::string_view instruction, const std::optional<std::string>& input,
                           bool instructed_model, const SeedPool& pool, Rng& rng) {
  require_instruction(instruction);
  const TaskType type = input ? TaskType::A : TaskType::B;
  const auto plan = plan_for(Stage::kOutputGen, type, instructed_model);

  Prompt prompt;
  if (plan.seed_demos > 0) {
    prompt.header = std::string(instance_header(type));
    prompt.demos = render_seed_demos(pool, type, plan.seed_demos, rng);
  }
  if (input && input->find(protocol::kEndOfSample) != std::string::npos) {
    throw DataError("input contains the end-of-sample marker");
  }
  std::string cue = labelled(protocol::kInstructionLabel, trim(instruction));
  if (input) {
    cue += '\n';
    cue += labelled(protocol::kInputLabel, trim(*input));
  }
  cue += '\n';
  cue += protocol::kOutputLabel;
  prompt.cue = std::move(cue);
  return prompt;
}

}  // namespace einst
