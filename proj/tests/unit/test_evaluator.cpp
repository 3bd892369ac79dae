#include <algorithm>
#include <fstream>
#include <random>

#include "doctest.h"
#include "einst/error.hpp"
#include "einst/evaluator.hpp"
#include "fixtures.hpp"
#include "json.hpp"

using namespace einst;
using nlohmann::json;

namespace {

void write_jsonl(const std::filesystem::path& p, const std::vector<json>& rows) {
  std::ofstream out(p, std::ios::binary);
  for (const auto& r : rows) out << r.dump() << '\n';
}

json ref(const std::string& task, const std::string& id, std::vector<std::string> refs) {
  return {{"task_id", task}, {"instance_id", id}, {"instruction", "i"}, {"references", refs}};
}

json pred(const std::string& task, const std::string& id, const std::string& text) {
  return {{"task_id", task}, {"instance_id", id}, {"prediction", text}};
}

std::string error_of(const std::filesystem::path& p, const std::filesystem::path& r) {
  try {
    evaluate(p, r);
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("score_record") {
  CHECK(score_record({"t", "1", "the answer is blue", {"The answer is blue."}}) == 1.0);
  CHECK(score_record({"t", "1", "red", {"blue", "green"}}) == 0.0);
  CHECK(score_record({"t", "1", "green", {"blue", "green"}}) == 1.0);
  CHECK_THROWS_AS(score_record({"t", "1", "x", {}}), DataError);
}

TEST_CASE("exact predictions score 100, half disjoint scores 50") {
  fixtures::TempDir dir;
  std::vector<json> refs, exact, half;
  for (int t = 0; t < 3; ++t) {
    for (int i = 0; i < 4; ++i) {
      const auto task = "task" + std::to_string(t);
      const auto id = std::to_string(i);
      const std::string text = "answer number " + std::to_string(t * 10 + i);
      refs.push_back(ref(task, id, {text}));
      exact.push_back(pred(task, id, text));
      half.push_back(pred(task, id, i % 2 ? text : "zzz qqq"));
    }
  }
  write_jsonl(dir / "ref.jsonl", refs);
  write_jsonl(dir / "exact.jsonl", exact);
  write_jsonl(dir / "half.jsonl", half);

  const auto full = evaluate(dir / "exact.jsonl", dir / "ref.jsonl");
  CHECK(full.overall == 100.0);
  CHECK(full.record_count == 12);
  CHECK(full.per_task.size() == 3);
  CHECK(full.task_mean == 100.0);

  const auto h = evaluate(dir / "half.jsonl", dir / "ref.jsonl");
  CHECK(h.overall == 50.0);
  CHECK(h.per_task.at("task1").mean == 50.0);
  CHECK(h.to_json()["overall"] == 50.0);
  CHECK(h.to_text().find("50.0") != std::string::npos);
}

TEST_CASE("record order does not matter") {
  fixtures::TempDir dir;
  std::vector<json> refs, preds;
  std::mt19937_64 gen(4);
  for (int i = 0; i < 60; ++i) {
    const auto task = "t" + std::to_string(i % 7);
    refs.push_back(ref(task, std::to_string(i), {"a b c d " + std::to_string(i % 5), "e f"}));
    preds.push_back(pred(task, std::to_string(i), "a c " + std::to_string(gen() % 5)));
  }
  write_jsonl(dir / "ref.jsonl", refs);
  write_jsonl(dir / "pred.jsonl", preds);
  const auto base = evaluate(dir / "pred.jsonl", dir / "ref.jsonl").to_json().dump();
  for (int k = 0; k < 5; ++k) {
    std::shuffle(preds.begin(), preds.end(), gen);
    std::shuffle(refs.begin(), refs.end(), gen);
    write_jsonl(dir / "pred.jsonl", preds);
    write_jsonl(dir / "ref.jsonl", refs);
    CHECK(evaluate(dir / "pred.jsonl", dir / "ref.jsonl").to_json().dump() == base);
  }
}

TEST_CASE("adding a record moves the mean toward its score") {
  std::mt19937_64 gen(8);
  std::vector<EvalRecord> records;
  for (int i = 0; i < 40; ++i) {
    records.push_back({"t", std::to_string(i), "x y " + std::to_string(gen() % 3),
                       {"x " + std::to_string(gen() % 3) + " z"}});
    if (records.size() < 2) continue;
    auto before = records;
    before.pop_back();
    const double m0 = evaluate_records(before).overall;
    const double m1 = evaluate_records(records).overall;
    const double s = 100.0 * score_record(records.back());
    REQUIRE(std::abs(m1 - s) <= std::abs(m0 - s) + 1e-9);
  }
}

TEST_CASE("alignment errors") {
  fixtures::TempDir dir;
  write_jsonl(dir / "ref.jsonl", {ref("t", "1", {"a"}), ref("t", "2", {"b"})});
  write_jsonl(dir / "extra.jsonl", {pred("t", "1", "a"), pred("t", "2", "b"), pred("t", "9", "c")});
  CHECK(error_of(dir / "extra.jsonl", dir / "ref.jsonl").find("t/9") != std::string::npos);

  write_jsonl(dir / "short.jsonl", {pred("t", "1", "a")});
  CHECK(error_of(dir / "short.jsonl", dir / "ref.jsonl").find("t/2") != std::string::npos);

  write_jsonl(dir / "dup.jsonl", {pred("t", "1", "a"), pred("t", "1", "a"), pred("t", "2", "b")});
  CHECK(error_of(dir / "dup.jsonl", dir / "ref.jsonl").find("duplicate") != std::string::npos);

  write_jsonl(dir / "noref.jsonl", {ref("t", "1", {})});
  CHECK_FALSE(error_of(dir / "short.jsonl", dir / "noref.jsonl").empty());
}
