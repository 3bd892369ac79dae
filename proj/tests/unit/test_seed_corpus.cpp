#include <cstdlib>
#include <fstream>
#include <map>
#include <set>

#include "doctest.h"
#include "einst/error.hpp"
#include "einst/seed_corpus.hpp"
#include "fixtures.hpp"

using namespace einst;

namespace {

std::filesystem::path write_lines(const fixtures::TempDir& dir, const std::string& body) {
  auto p = dir / "seeds.jsonl";
  std::ofstream(p, std::ios::binary) << body;
  return p;
}

std::string error_of(const std::filesystem::path& p) {
  try {
    load_seed_tasks(p);
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("blank input means type B") {
  fixtures::TempDir dir;
  const auto p = write_lines(dir,
                             R"({"id":"t1","instruction":"Do X.","input":"","output":"done"})" "\n"
                             R"({"id":"t2","instruction":"Do Y.","input":"  \t","output":"ok"})" "\n"
                             R"({"id":"t3","instruction":"Sort.","input":"[3, 1]","output":"[1, 3]"})" "\n");
  const auto pool = load_seed_tasks(p);
  CHECK(pool.type_a().size() == 1);
  CHECK(pool.type_b().size() == 2);
  CHECK_FALSE(pool.type_b()[0].input.has_value());
  CHECK(pool.type_a()[0].input == "[3, 1]");
}

TEST_CASE("upstream shape uses the first instance") {
  fixtures::TempDir dir;
  const auto p = write_lines(
      dir, R"({"id":"seed_task_0","name":"x","instruction":"Convert 85 F to Celsius.","instances":[{"input":"","output":"29.44C"},{"input":"q","output":"r"}],"is_classification":false})" "\n");
  const auto pool = load_seed_tasks(p);
  REQUIRE(pool.type_b().size() == 1);
  CHECK(pool.type_b()[0].output == "29.44C");
  CHECK(pool.type_b()[0].id == "seed_task_0");
}

TEST_CASE("missing output names the line and the field") {
  fixtures::TempDir dir;
  const auto p = write_lines(dir,
                             R"({"id":"t1","instruction":"Do X.","output":"done"})" "\n"
                             R"({"id":"t2","instruction":"Do Y."})" "\n");
  const auto msg = error_of(p);
  CHECK(msg.find(":2") != std::string::npos);
  CHECK(msg.find("output") != std::string::npos);
}

TEST_CASE("duplicate ids are rejected") {
  fixtures::TempDir dir;
  const auto p = write_lines(dir,
                             R"({"id":"t1","instruction":"Do X.","output":"a"})" "\n"
                             R"({"id":"t1","instruction":"Do Y.","output":"b"})" "\n");
  CHECK(error_of(p).find("duplicate") != std::string::npos);
  auto tasks = fixtures::seed_tasks(2, 0);
  tasks[1].id = tasks[0].id;
  CHECK_THROWS_AS(SeedPool{tasks}, DataError);
}

TEST_CASE("categorization is total and exclusive") {
  const auto tasks = fixtures::seed_tasks(125, 50);
  const SeedPool pool(tasks);
  CHECK(pool.type_a().size() == 125);
  CHECK(pool.type_b().size() == 50);
  CHECK(pool.size() == tasks.size());
  for (const auto& t : pool.type_a()) CHECK(t.type() == TaskType::A);
  for (const auto& t : pool.type_b()) CHECK(t.type() == TaskType::B);
}

TEST_CASE("sample_demos draws distinct tasks of one type") {
  const auto pool = fixtures::seed_pool();
  Rng rng(7);
  const auto demos = sample_demos(pool, TaskType::A, 20, rng);
  REQUIRE(demos.size() == 20);
  std::set<std::string> ids;
  for (const auto& d : demos) {
    CHECK(d.type() == TaskType::A);
    ids.insert(d.id);
  }
  CHECK(ids.size() == 20);

  Rng again(7);
  CHECK(sample_demos(pool, TaskType::A, 20, again) == demos);
  Rng other(8);
  CHECK(sample_demos(pool, TaskType::A, 20, other) != demos);

  Rng any(1);
  CHECK(sample_demos(pool, TaskType::B, 0, any).empty());
  CHECK_THROWS_AS(sample_demos(pool, TaskType::B, 51, any), DataError);
  CHECK(sample_demos(pool, TaskType::B, 50, any).size() == 50);
}

TEST_CASE("sample_demos is roughly uniform") {
  const auto pool = fixtures::seed_pool(10, 0);
  std::map<std::string, int> hits;
  Rng rng(3);
  for (int i = 0; i < 5000; ++i) {
    for (const auto& d : sample_demos(pool, TaskType::A, 3, rng)) hits[d.id]++;
  }
  REQUIRE(hits.size() == 10);
  // Expected 1500 each; 5 sigma is about 160.
  for (const auto& [id, n] : hits) CHECK(std::abs(n - 1500) < 200);
}

TEST_CASE("task types parse") {
  CHECK(parse_task_type("a") == TaskType::A);
  CHECK(parse_task_type("B") == TaskType::B);
  CHECK_THROWS_AS(parse_task_type("C"), DataError);
}
