#include "einst/dataset_store.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "einst/error.hpp"
#include "einst/jsonl.hpp"
#include "einst/text.hpp"

namespace einst {

SyntheticExample make_example(std::string id, std::string instruction,
                              std::optional<std::string> input, std::string generator,
                              const CandidateOutputs& candidates,
                              const EnsembleDecision& decision) {
  if (!decision.selected || !decision.selected_index) {
    throw DataError("example " + id + ": consensus selected nothing");
  }
  SyntheticExample ex;
  ex.id = std::move(id);
  ex.instruction = std::move(instruction);
  ex.task_type = input ? TaskType::A : TaskType::B;
  ex.input = std::move(input);
  ex.output = *decision.selected;
  ex.generator = std::move(generator);
  EnsembleSummary summary;
  summary.candidates = candidates.outputs;
  summary.sources = candidates.sources;
  summary.pair_scores = decision.pair_scores;
  summary.selected_index = *decision.selected_index;
  summary.threshold = decision.threshold;
  ex.ensemble = std::move(summary);
  return ex;
}

SyntheticExample seed_example(const SeedTask& task) {
  SyntheticExample ex;
  ex.id = task.id;
  ex.instruction = task.instruction;
  ex.input = task.input;
  ex.output = task.output;
  ex.task_type = task.type();
  ex.generator = "seed";
  return ex;
}

nlohmann::json to_json(const SyntheticExample& ex) {
  nlohmann::json j = {
      {"id", ex.id},
      {"instruction", ex.instruction},
      {"output", ex.output},
      {"task_type", std::string(to_string(ex.task_type))},
      {"generator", ex.generator},
  };
  j["input"] = ex.input ? nlohmann::json(*ex.input) : nlohmann::json(nullptr);
  if (ex.ensemble) {
    const auto& e = *ex.ensemble;
    j["ensemble"] = {
        {"candidates", e.candidates},
        {"sources", e.sources},
        {"pair_scores", e.pair_scores},
        {"selected_index", e.selected_index},
        {"threshold", e.threshold},
    };
  } else {
    j["ensemble"] = nullptr;
  }
  return j;
}

namespace {

template <typename T>
T field(const nlohmann::json& obj, const char* name, const std::string& where) {
  auto it = obj.find(name);
  if (it == obj.end()) throw DataError(where + ": missing field '" + name + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw DataError(where + ": field '" + name + "' has the wrong type");
  }
}

}  // namespace

SyntheticExample example_from_json(const nlohmann::json& j) {
  SyntheticExample ex;
  const std::string where = "example";
  ex.id = field<std::string>(j, "id", where);
  const std::string at = where + " " + ex.id;
  ex.instruction = field<std::string>(j, "instruction", at);
  ex.output = field<std::string>(j, "output", at);
  ex.task_type = parse_task_type(field<std::string>(j, "task_type", at));
  ex.generator = field<std::string>(j, "generator", at);
  if (auto it = j.find("input"); it != j.end() && !it->is_null()) {
    ex.input = field<std::string>(j, "input", at);
  }
  if (auto it = j.find("ensemble"); it != j.end() && !it->is_null()) {
    EnsembleSummary e;
    const std::string eat = at + " ensemble";
    e.candidates = field<std::array<std::string, 3>>(*it, "candidates", eat);
    e.sources = field<std::array<std::string, 3>>(*it, "sources", eat);
    e.pair_scores = field<std::array<double, 3>>(*it, "pair_scores", eat);
    e.selected_index = field<int>(*it, "selected_index", eat);
    e.threshold = field<double>(*it, "threshold", eat);
    ex.ensemble = std::move(e);
  }
  return ex;
}

void validate_example(const SyntheticExample& ex) {
  const std::string at = "example " + ex.id;
  if (ex.id.empty()) throw DataError("example: empty id");
  if (trim(ex.instruction).empty()) throw DataError(at + ": empty instruction");
  if (trim(ex.output).empty()) throw DataError(at + ": empty output");
  if (ex.input && trim(*ex.input).empty()) throw DataError(at + ": blank input must be absent");
  const TaskType expected = ex.input ? TaskType::A : TaskType::B;
  if (ex.task_type != expected) {
    throw DataError(at + ": task type " + std::string(to_string(ex.task_type)) +
                    " does not match input presence");
  }
  if (ex.ensemble) {
    const auto& e = *ex.ensemble;
    if (e.selected_index < 1 || e.selected_index > 3) {
      throw DataError(at + ": selected_index out of range");
    }
    if (ex.output != e.candidates[static_cast<std::size_t>(e.selected_index - 1)]) {
      throw DataError(at + ": output differs from the selected candidate");
    }
    const double min_score = *std::min_element(e.pair_scores.begin(), e.pair_scores.end());
    if (!(min_score > e.threshold)) {
      throw DataError(at + ": pair scores do not clear the consensus threshold");
    }
  }
}

void DatasetStore::add_example(SyntheticExample example) {
  validate_example(example);
  if (!ids_.insert(example.id).second) throw DataError("duplicate example id '" + example.id + "'");
  examples_.push_back(std::move(example));
}

TypeBalance DatasetStore::type_balance() const {
  TypeBalance b;
  for (const auto& ex : examples_) (ex.task_type == TaskType::A ? b.type_a : b.type_b)++;
  return b;
}

void DatasetStore::write_dataset(const std::filesystem::path& path, bool include_seeds,
                                 const SeedPool& seeds) const {
  if (examples_.empty() && !(include_seeds && seeds.size() > 0)) {
    throw DataError("nothing to write: the store is empty and seeds are not included");
  }
  std::vector<const SyntheticExample*> rows;
  std::vector<SyntheticExample> seed_rows;
  if (include_seeds) {
    for (const auto* t : seeds.all()) {
      if (ids_.count(t->id)) throw DataError("seed id '" + t->id + "' collides with an example");
      seed_rows.push_back(seed_example(*t));
    }
  }
  for (const auto& ex : examples_) rows.push_back(&ex);
  for (const auto& ex : seed_rows) rows.push_back(&ex);
  std::sort(rows.begin(), rows.end(),
            [](const SyntheticExample* a, const SyntheticExample* b) { return a->id < b->id; });

  std::vector<nlohmann::json> records;
  records.reserve(rows.size());
  for (const auto* r : rows) records.push_back(to_json(*r));
  jsonl::write_records(path, records);
}

std::vector<SyntheticExample> read_dataset(const std::filesystem::path& path) {
  std::vector<SyntheticExample> out;
  jsonl::for_each_record(path, [&](const nlohmann::json& rec, std::size_t line) {
    try {
      out.push_back(example_from_json(rec));
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  });
  return out;
}

std::string PipelineStats::ensembled_cell() const {
  return std::to_string(ensembled) + " (" + std::to_string(percent_ensembled) + "%)";
}

nlohmann::json PipelineStats::to_json() const {
  return {{"instructions", instructions},
          {"valid_instances", valid_instances},
          {"ensembled", ensembled},
          {"percent_ensembled", percent_ensembled}};
}

PipelineStats compute_stats(std::size_t instructions, std::size_t valid_instances,
                            std::size_t ensembled) {
  if (ensembled > valid_instances || valid_instances > instructions) {
    throw DataError("stats: counts must satisfy ensembled <= valid_instances <= instructions");
  }
  PipelineStats s{instructions, valid_instances, ensembled, 0};
  if (valid_instances > 0) {
    // Integer half-up rounding of 100*e/v.
    s.percent_ensembled =
        static_cast<int>((200 * ensembled + valid_instances) / (2 * valid_instances));
  }
  return s;
}

std::string format_stats_table(const std::vector<std::pair<std::string, PipelineStats>>& rows) {
  std::size_t label_width = 5;
  for (const auto& [label, _] : rows) label_width = std::max(label_width, label.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(label_width)) << "label"
      << " | instruction | instance | ensemble\n";
  out << std::string(label_width, '-') << "-|-------------|----------|---------\n";
  for (const auto& [label, s] : rows) {
    out << std::left << std::setw(static_cast<int>(label_width)) << label << " | "
        << std::right << std::setw(11) << s.instructions << " | " << std::setw(8)
        << s.valid_instances << " | " << s.ensembled_cell() << '\n';
  }
  return out.str();
}

}  // namespace einst
