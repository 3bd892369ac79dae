#include "einst/consensus.hpp"

#include <algorithm>
#include <future>

#include "einst/error.hpp"
#include "einst/metric.hpp"
#include "einst/prompting.hpp"
#include "einst/text.hpp"

namespace einst {

EnsembleDecision ensemble_select(const CandidateOutputs& candidates, double threshold) {
  if (!(threshold >= 0.0)) throw DataError("consensus threshold must be >= 0");

  std::array<TokenSeq, 3> tokens;
  for (std::size_t i = 0; i < 3; ++i) tokens[i] = tokenize(candidates.outputs[i]);

  EnsembleDecision d;
  d.threshold = threshold;
  for (std::size_t p = 0; p < kPairs.size(); ++p) {
    d.pair_scores[p] = rouge_l(tokens[kPairs[p][0]], tokens[kPairs[p][1]]).f1;
  }
  d.min_score = *std::min_element(d.pair_scores.begin(), d.pair_scores.end());
  if (d.min_score > threshold) {
    // max_element returns the first maximum, which is the tie rule.
    const auto best = static_cast<std::size_t>(
        std::max_element(d.pair_scores.begin(), d.pair_scores.end()) - d.pair_scores.begin());
    const auto index = kPairs[best][0];
    d.selected = candidates.outputs[index];
    d.selected_index = static_cast<int>(index) + 1;
  }
  return d;
}

std::string clean_output(std::string_view completion) {
  const auto lines = split_lines(cut_at(completion, protocol::kEndOfSample));
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (starts_with_ci(trim(lines[i]), protocol::kInstructionLabel)) break;
    if (i > 0) out += '\n';
    out += lines[i];
  }
  return std::string(trim(out));
}

CandidateOutputs gather_outputs(std::string_view primary_output, std::string_view primary_source,
                                std::string_view instruction,
                                const std::optional<std::string>& input, Backend& aux1,
                                Backend& aux2, const SeedPool& pool, Rng& rng,
                                const OutputGenOptions& options) {
  auto request_for = [&](Backend& b) {
    const auto prompt = build_output_prompt(instruction, input, b.instructed(), pool, rng);
    CompletionRequest req;
    req.prompt = prompt.render();
    req.max_tokens = options.max_tokens;
    req.temperature = options.temperature;
    req.stop = prompt.stop_sequence;
    return req;
  };
  const auto req1 = request_for(aux1);
  const auto req2 = request_for(aux2);

  std::string out1, out2;
  if (&aux1 == &aux2) {
    out1 = aux1.complete(req1).text;
    out2 = aux2.complete(req2).text;
  } else {
    auto second = std::async(std::launch::async, [&] { return aux2.complete(req2).text; });
    out1 = aux1.complete(req1).text;
    out2 = second.get();
  }

  CandidateOutputs c;
  c.outputs = {std::string(trim(primary_output)), clean_output(out1), clean_output(out2)};
  c.sources = {std::string(primary_source), aux1.name(), aux2.name()};
  return c;
}

}  // namespace einst
