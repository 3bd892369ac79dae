#include <set>

#include "doctest.h"
#include "einst/error.hpp"
#include "einst/prompting.hpp"
#include "fixtures.hpp"

using namespace einst;

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool has_line_starting(std::string_view text, std::string_view label) {
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    if (text.substr(pos, label.size()) == label) return true;
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return false;
}

std::vector<std::string> synthetic(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("Synthetic instruction " + std::to_string(i));
  return out;
}

}  // namespace

TEST_CASE("prompt plans") {
  auto p = plan_for(Stage::kInstructionGen, TaskType::A);
  CHECK(p.seed_demos + p.synthetic_demos == 24);
  CHECK(p.synthetic_demos == 4);
  p = plan_for(Stage::kInstructionGen, TaskType::B);
  CHECK(p.seed_demos == 8);
  CHECK(p.synthetic_demos == 2);
  CHECK(plan_for(Stage::kInstanceGen, TaskType::A).seed_demos == 18);
  CHECK(plan_for(Stage::kInstanceGen, TaskType::B).seed_demos == 15);
  CHECK(plan_for(Stage::kOutputGen, TaskType::A, false).seed_demos == 18);
  CHECK(plan_for(Stage::kOutputGen, TaskType::B, true).seed_demos == 0);
}

TEST_CASE("instruction prompt mixes seeds and synthetic instructions") {
  const auto pool = fixtures::seed_pool();
  const auto syn = synthetic(10);
  Rng rng(1);
  const auto a = build_instruction_prompt(pool, syn, TaskType::A, rng);
  CHECK(a.demos.size() == 24);
  CHECK(a.synthetic_count == 4);
  std::size_t from_synthetic = 0;
  for (const auto& d : a.demos) {
    CHECK(d.rfind("instruction: ", 0) == 0);
    CHECK(ends_with(d, "\n|EoS|"));
    if (d.find("Synthetic instruction") != std::string::npos) ++from_synthetic;
  }
  CHECK(from_synthetic == 4);
  CHECK(a.cue == "instruction:");
  CHECK(a.stop_sequence == "|EoS|");

  Rng rng_b(1);
  const auto b = build_instruction_prompt(pool, {}, TaskType::B, rng_b);
  CHECK(b.demos.size() == 10);
  CHECK(b.synthetic_count == 0);
  std::set<std::string> seed_lines;
  for (const auto& t : pool.type_b()) seed_lines.insert("instruction: " + t.instruction + "\n|EoS|");
  for (const auto& d : b.demos) CHECK(seed_lines.count(d) == 1);
}

TEST_CASE("instruction prompt backfills missing synthetic slots") {
  const auto pool = fixtures::seed_pool();
  const auto syn = synthetic(1);
  Rng rng(2);
  const auto p = build_instruction_prompt(pool, syn, TaskType::B, rng);
  CHECK(p.demos.size() == 10);
  CHECK(p.synthetic_count == 1);
}

TEST_CASE("instruction prompt needs enough seeds") {
  const auto pool = fixtures::seed_pool(5, 50);
  Rng rng(0);
  CHECK_THROWS_AS(build_instruction_prompt(pool, {}, TaskType::A, rng), DataError);
}

TEST_CASE("rendered prompt layout") {
  const auto pool = fixtures::seed_pool();
  Rng rng(4);
  const auto p = build_instruction_prompt(pool, {}, TaskType::A, rng);
  std::string expected = p.header;
  for (const auto& d : p.demos) expected += "\n\n" + d;
  expected += "\n\ninstruction:";
  CHECK(p.render() == expected);
}

TEST_CASE("instance prompts follow the template") {
  const auto pool = fixtures::seed_pool();
  Rng rng(3);
  const auto a = build_instance_prompt("Sort the given input ascendingly.", pool, TaskType::A, rng);
  CHECK(a.demos.size() == 18);
  CHECK(a.header ==
        "Generate examples for the following instructions. The instruction requires input and "
        "output instances. And you have to generate both input and output.");
  CHECK(a.cue == "instruction: Sort the given input ascendingly.\ninput:");
  for (const auto& d : a.demos) {
    CHECK(has_line_starting(d, "input: "));
    CHECK(has_line_starting(d, "output: "));
    CHECK(ends_with(d, "\n|EoS|"));
  }

  Rng rng_b(3);
  const auto b = build_instance_prompt("Which exercises are best for reducing belly fat at home?",
                                       pool, TaskType::B, rng_b);
  CHECK(b.demos.size() == 15);
  CHECK(b.header ==
        "Generate examples for the instructions. The instruction does not require input and "
        "generate the output directly.");
  CHECK(ends_with(b.cue, "\noutput:"));
  for (const auto& d : b.demos) {
    CHECK_FALSE(has_line_starting(d, "input:"));
    CHECK(ends_with(d, "\n|EoS|"));
  }
}

TEST_CASE("instance prompt rejects a blank instruction") {
  const auto pool = fixtures::seed_pool();
  Rng rng(0);
  CHECK_THROWS_AS(build_instance_prompt("", pool, TaskType::A, rng), DataError);
  CHECK_THROWS_AS(build_instance_prompt("  \n", pool, TaskType::B, rng), DataError);
  CHECK_THROWS_AS(build_instance_prompt("x |EoS| y", pool, TaskType::B, rng), DataError);
}

TEST_CASE("output prompts are zero-shot for instructed models") {
  const auto pool = fixtures::seed_pool();
  Rng rng(5);
  const auto z = build_output_prompt("Convert 85 F to Celsius.", std::nullopt, true, pool, rng);
  CHECK(z.demos.empty());
  CHECK(z.render() == "instruction: Convert 85 F to Celsius.\noutput:");

  const auto zi = build_output_prompt("Sort the given input ascendingly.",
                                      std::string("[10, 92, 2, 5, -4, 92, 5, 101]"), true, pool, rng);
  CHECK(zi.render() ==
        "instruction: Sort the given input ascendingly.\ninput: [10, 92, 2, 5, -4, 92, 5, 101]\noutput:");

  Rng rng5(5);
  const auto f = build_output_prompt("Sort the given input ascendingly.",
                                     std::string("[10, 92, 2, 5, -4, 92, 5, 101]"), false, pool, rng5);
  CHECK(f.demos.size() == 18);
  for (const auto& d : f.demos) CHECK(has_line_starting(d, "input: "));

  const auto small = fixtures::seed_pool(3, 3);
  CHECK_THROWS_AS(build_output_prompt("x", std::nullopt, false, small, rng), DataError);
  CHECK_NOTHROW(build_output_prompt("x", std::nullopt, true, small, rng));
}

TEST_CASE("same seed, same prompt") {
  const auto pool = fixtures::seed_pool();
  const auto syn = synthetic(6);
  for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
    Rng r1(seed), r2(seed);
    CHECK(build_instruction_prompt(pool, syn, TaskType::A, r1).render() ==
          build_instruction_prompt(pool, syn, TaskType::A, r2).render());
    CHECK(build_instance_prompt("Do it.", pool, TaskType::B, r1).render() ==
          build_instance_prompt("Do it.", pool, TaskType::B, r2).render());
  }
}
