#include "einst/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <sstream>
#include <thread>
#include <tuple>
#include <utility>

#include "einst/error.hpp"
#include "einst/jsonl.hpp"
#include "einst/metric.hpp"

namespace einst {

double score_record(const EvalRecord& record) {
  if (record.references.empty()) {
    throw DataError("record " + record.task_id + "/" + record.instance_id + " has no references");
  }
  const auto pred = tokenize(record.prediction);
  double best = 0.0;
  for (const auto& ref : record.references) best = std::max(best, rouge_l(pred, tokenize(ref)).f1);
  return best;
}

EvalReport evaluate_records(std::vector<EvalRecord> records) {
  std::sort(records.begin(), records.end(), [](const EvalRecord& a, const EvalRecord& b) {
    return std::tie(a.task_id, a.instance_id) < std::tie(b.task_id, b.instance_id);
  });
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].task_id == records[i - 1].task_id &&
        records[i].instance_id == records[i - 1].instance_id) {
      throw DataError("duplicate record " + records[i].task_id + "/" + records[i].instance_id);
    }
  }

  std::vector<double> scores(records.size());
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
  const std::size_t chunk = (records.size() + workers - 1) / std::max<std::size_t>(workers, 1);
  std::vector<std::future<void>> jobs;
  for (std::size_t begin = 0; begin < records.size(); begin += chunk) {
    const std::size_t end = std::min(records.size(), begin + chunk);
    jobs.push_back(std::async(std::launch::async, [&, begin, end] {
      for (std::size_t i = begin; i < end; ++i) scores[i] = score_record(records[i]);
    }));
  }
  for (auto& j : jobs) j.get();

  EvalReport report;
  report.record_count = records.size();
  std::map<std::string, double> sums;
  double total = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    sums[records[i].task_id] += scores[i];
    report.per_task[records[i].task_id].count++;
    total += scores[i];
  }
  if (!records.empty()) report.overall = 100.0 * total / static_cast<double>(records.size());
  double task_total = 0.0;
  for (auto& [task, ts] : report.per_task) {
    ts.mean = 100.0 * sums[task] / static_cast<double>(ts.count);
    task_total += ts.mean;
  }
  if (!report.per_task.empty()) {
    report.task_mean = task_total / static_cast<double>(report.per_task.size());
  }
  return report;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json tasks = nlohmann::json::object();
  for (const auto& [task, ts] : per_task) tasks[task] = {{"rouge_l", ts.mean}, {"count", ts.count}};
  return {{"overall", overall},
          {"task_mean", task_mean},
          {"record_count", record_count},
          {"per_task", tasks}};
}

std::string EvalReport::to_text() const {
  std::size_t width = 4;
  for (const auto& [task, _] : per_task) width = std::max(width, task.size());
  std::ostringstream out;
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof buf, "%6.1f", v);
    return std::string(buf);
  };
  out << std::string(width, ' ') << "  rouge_l  count\n";
  for (const auto& [task, ts] : per_task) {
    out << task << std::string(width - task.size(), ' ') << "  " << fmt(ts.mean) << "  "
        << ts.count << '\n';
  }
  out << "overall (record mean): " << fmt(overall) << " over " << record_count << " records\n";
  out << "overall (task mean):   " << fmt(task_mean) << " over " << per_task.size() << " tasks\n";
  return out.str();
}

namespace {

using Key = std::pair<std::string, std::string>;

std::string string_field(const nlohmann::json& rec, const char* name, const std::string& where) {
  auto it = rec.find(name);
  if (it == rec.end() || !it->is_string()) {
    throw DataError(where + ": missing or non-string field '" + name + "'");
  }
  return it->get<std::string>();
}

std::string list_keys(const std::vector<Key>& keys) {
  std::string out;
  for (std::size_t i = 0; i < keys.size() && i < 10; ++i) {
    if (i) out += ", ";
    out += keys[i].first + "/" + keys[i].second;
  }
  if (keys.size() > 10) out += ", ... (" + std::to_string(keys.size()) + " total)";
  return out;
}

}  // namespace

std::vector<EvalRecord> align_files(const std::filesystem::path& predictions,
                                    const std::filesystem::path& references) {
  std::map<Key, std::vector<std::string>> refs;
  jsonl::for_each_record(references, [&](const nlohmann::json& rec, std::size_t line) {
    const auto where = references.string() + ":" + std::to_string(line);
    Key key{string_field(rec, "task_id", where), string_field(rec, "instance_id", where)};
    auto it = rec.find("references");
    if (it == rec.end() || !it->is_array() || it->empty()) {
      throw DataError(where + ": 'references' must be a nonempty array");
    }
    std::vector<std::string> texts;
    for (const auto& r : *it) {
      if (!r.is_string()) throw DataError(where + ": references must be strings");
      texts.push_back(r.get<std::string>());
    }
    if (!refs.emplace(key, std::move(texts)).second) {
      throw DataError(where + ": duplicate instance_id " + key.first + "/" + key.second);
    }
  });

  std::vector<EvalRecord> records;
  std::vector<Key> unmatched;
  std::map<Key, bool> seen;
  jsonl::for_each_record(predictions, [&](const nlohmann::json& rec, std::size_t line) {
    const auto where = predictions.string() + ":" + std::to_string(line);
    Key key{string_field(rec, "task_id", where), string_field(rec, "instance_id", where)};
    if (!seen.emplace(key, true).second) {
      throw DataError(where + ": duplicate instance_id " + key.first + "/" + key.second);
    }
    auto it = refs.find(key);
    if (it == refs.end()) {
      unmatched.push_back(key);
      return;
    }
    records.push_back({key.first, key.second, string_field(rec, "prediction", where), it->second});
  });
  if (!unmatched.empty()) {
    throw DataError("predictions without references: " + list_keys(unmatched));
  }
  std::vector<Key> missing;
  for (const auto& [key, _] : refs) {
    if (!seen.count(key)) missing.push_back(key);
  }
  if (!missing.empty()) throw DataError("references without predictions: " + list_keys(missing));
  return records;
}

EvalReport evaluate(const std::filesystem::path& predictions,
                    const std::filesystem::path& references) {
  return evaluate_records(align_files(predictions, references));
}

}  // namespace einst
