#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "einst/lm_gateway.hpp"
#include "einst/rng.hpp"
#include "einst/seed_corpus.hpp"

namespace einst {

struct ParsedInstance {
  std::string instruction;
  std::optional<std::string> input;
  std::string output;
  std::string raw;

  friend bool operator==(const ParsedInstance&, const ParsedInstance&) = default;
};

enum class RejectionReason {
  kMissingOutput,
  kMissingInput,
  kEmptyField,
  kStrayInputInTypeB,
  kTruncated,
  kLabelOrderViolation,
};

std::string_view to_string(RejectionReason reason);

using InstanceResult = std::variant<ParsedInstance, RejectionReason>;

// Parses the continuation of an instance prompt. For type A the cue ended
// in "input:", so the text before the first line starting with "output:"
// (case-insensitive) is the input and the rest is the output. For type B
// the whole text is the output. Text after the end-of-sample marker is
// ignored; fields are trimmed.
//
// Rejections:
//   truncated              the backend hit max_tokens
//   missing_output         A: no "output:" line
//   missing_input          A: nothing before the "output:" line
//   empty_field            the output is blank
//   stray_input_in_type_b  B: a line starts with "input:"
//   label_order_violation  an "instruction:" line anywhere, an "input:" line
//                          in an A completion, or a second "output:" line
InstanceResult parse_instance(std::string_view raw, TaskType type,
                              std::string_view instruction = {}, bool truncated = false);

struct InstanceGenOptions {
  int max_tokens = 512;
  double temperature = 0.7;
};

// One instance attempt: build the prompt, request one completion, parse.
InstanceResult synthesize_instance(Backend& backend, std::string_view instruction, TaskType type,
                                   const SeedPool& pool, Rng& rng,
                                   const InstanceGenOptions& options = {});

}  // namespace einst
