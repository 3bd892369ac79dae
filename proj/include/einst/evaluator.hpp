#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace einst {

struct EvalRecord {
  std::string task_id;
  std::string instance_id;
  std::string prediction;
  std::vector<std::string> references;  // nonempty
};

// Best Rouge-L F1 of the prediction over all references, in [0, 1].
// Throws DataError when references is empty.
double score_record(const EvalRecord& record);

struct TaskScore {
  double mean = 0.0;  // x100
  std::size_t count = 0;
};

struct EvalReport {
  std::map<std::string, TaskScore> per_task;
  // Mean over records x100.
  double overall = 0.0;
  // Mean of per-task means, for comparison; also x100.
  double task_mean = 0.0;
  std::size_t record_count = 0;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

// Scores records in parallel and aggregates in (task_id, instance_id)
// order, so the report does not depend on input order. Throws DataError on
// duplicate (task_id, instance_id) keys.
EvalReport evaluate_records(std::vector<EvalRecord> records);

// Reference lines: {task_id, instance_id, instruction, input?, references}.
// Prediction lines: {task_id, instance_id, prediction}. Throws DataError
// listing ids that appear on one side only, and on duplicates.
std::vector<EvalRecord> align_files(const std::filesystem::path& predictions,
                                    const std::filesystem::path& references);

EvalReport evaluate(const std::filesystem::path& predictions,
                    const std::filesystem::path& references);

}  // namespace einst
