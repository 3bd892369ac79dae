#include "einst/instance_synthesis.hpp"

#include <vector>

#include "einst/prompting.hpp"
#include "einst/text.hpp"

namespace einst {

std::string_view to_string(RejectionReason reason) {
  switch (reason) {
    case RejectionReason::kMissingOutput:
      return "missing_output";
    case RejectionReason::kMissingInput:
      return "missing_input";
    case RejectionReason::kEmptyField:
      return "empty_field";
    case RejectionReason::kStrayInputInTypeB:
      return "stray_input_in_type_b";
    case RejectionReason::kTruncated:
      return "truncated";
    case RejectionReason::kLabelOrderViolation:
      return "label_order_violation";
  }
  return "?";
}

namespace {

bool line_has_label(std::string_view line, std::string_view label) {
  return starts_with_ci(trim(line), label);
}

std::string join(const std::vector<std::string_view>& lines, std::size_t begin,
                 std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out += '\n';
    out += lines[i];
  }
  return out;
}

}  // namespace

InstanceResult parse_instance(std::string_view raw, TaskType type, std::string_view instruction,
                              bool truncated) {
  if (truncated) return RejectionReason::kTruncated;
  const auto lines = split_lines(cut_at(raw, protocol::kEndOfSample));

  std::optional<std::size_t> output_line;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (line_has_label(line, protocol::kInstructionLabel)) {
      return RejectionReason::kLabelOrderViolation;
    }
    if (line_has_label(line, protocol::kInputLabel)) {
      return type == TaskType::B ? RejectionReason::kStrayInputInTypeB
                                 : RejectionReason::kLabelOrderViolation;
    }
    if (line_has_label(line, protocol::kOutputLabel)) {
      if (type == TaskType::B || output_line) return RejectionReason::kLabelOrderViolation;
      output_line = i;
    }
  }

  ParsedInstance inst;
  inst.instruction = std::string(trim(instruction));
  inst.raw = std::string(raw);

  if (type == TaskType::B) {
    inst.output = std::string(trim(join(lines, 0, lines.size())));
    if (inst.output.empty()) return RejectionReason::kEmptyField;
    return inst;
  }

  if (!output_line) return RejectionReason::kMissingOutput;
  const auto input = std::string(trim(join(lines, 0, *output_line)));
  if (input.empty()) return RejectionReason::kMissingInput;

  auto first = trim(lines[*output_line]);
  first.remove_prefix(protocol::kOutputLabel.size());
  std::string output(first);
  const auto rest = join(lines, *output_line + 1, lines.size());
  if (!rest.empty()) {
    output += '\n';
    output += rest;
  }
  inst.input = input;
  inst.output = std::string(trim(output));
  if (inst.output.empty()) return RejectionReason::kEmptyField;
  return inst;
}

InstanceResult synthesize_instance(Backend& backend, std::string_view instruction, TaskType type,
                                   const SeedPool& pool, Rng& rng,
                                   const InstanceGenOptions& options) {
  const auto prompt = build_instance_prompt(instruction, pool, type, rng);
  CompletionRequest req;
  req.prompt = prompt.render();
  req.max_tokens = options.max_tokens;
  req.temperature = options.temperature;
  req.stop = prompt.stop_sequence;
  const auto completion = backend.complete(req);
  return parse_instance(completion.text, type, instruction, completion.truncated);
}

}  // namespace einst
