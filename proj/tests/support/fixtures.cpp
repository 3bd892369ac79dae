#include "fixtures.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>

namespace einst::fixtures {

using nlohmann::json;

std::vector<SeedTask> seed_tasks(std::size_t type_a, std::size_t type_b) {
  static const std::array<const char*, 6> kVerbs = {"Rewrite", "Summarize", "Classify",
                                                     "Translate", "Sort", "Explain"};
  std::vector<SeedTask> out;
  char id[32];
  for (std::size_t i = 0; i < type_a; ++i) {
    std::snprintf(id, sizeof id, "sa-%04zu", i + 1);
    SeedTask t;
    t.id = id;
    t.instruction = std::string(kVerbs[i % kVerbs.size()]) + " the given item number " +
                    std::to_string(i) + " for seed topic " + std::to_string(i % 13) + ".";
    t.input = "seed input " + std::to_string(i);
    t.output = "seed output " + std::to_string(i);
    out.push_back(std::move(t));
  }
  for (std::size_t i = 0; i < type_b; ++i) {
    std::snprintf(id, sizeof id, "sb-%04zu", i + 1);
    SeedTask t;
    t.id = id;
    t.instruction = "Name a fact about seed subject " + std::to_string(i) + ".";
    t.output = "seed answer " + std::to_string(i);
    out.push_back(std::move(t));
  }
  return out;
}

SeedPool seed_pool(std::size_t type_a, std::size_t type_b) {
  return SeedPool(seed_tasks(type_a, type_b));
}

void write_seed_file(const std::filesystem::path& path, std::size_t type_a, std::size_t type_b) {
  std::ofstream out(path, std::ios::binary);
  for (const auto& t : seed_tasks(type_a, type_b)) {
    json rec = {{"id", t.id}, {"instruction", t.instruction}, {"output", t.output},
                {"input", t.input ? *t.input : ""}};
    out << rec.dump() << '\n';
  }
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string random_instruction(Rng& rng, std::size_t words) {
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) out += ' ';
    out += 'w';
    out += std::to_string(rng.below(4096));
  }
  return out;
}

std::function<std::string(std::string_view)> instruction_responder(std::uint64_t seed,
                                                                    std::size_t dup_every) {
  struct State {
    std::mutex mutex;
    Rng rng;
    std::size_t calls = 0;
    explicit State(std::uint64_t s) : rng(s) {}
  };
  auto state = std::make_shared<State>(seed);
  return [state, dup_every](std::string_view prompt) -> std::string {
    std::lock_guard lock(state->mutex);
    ++state->calls;
    if (dup_every && state->calls % dup_every == 0) {
      const auto at = prompt.find("instruction: ");
      if (at != std::string_view::npos) {
        const auto start = at + 13;
        return " " + std::string(prompt.substr(start, prompt.find('\n', start) - start)) +
               "\n|EoS|";
      }
    }
    return " " + random_instruction(state->rng) + "\n|EoS|";
  };
}

json mock_config(const std::filesystem::path& seed_path, const std::filesystem::path& out_dir,
                 std::uint64_t rng_seed) {
  const json instructions = {
      " Reverse the order of words in the sentence.\n|EoS|",
      " List three prime numbers larger than a given bound.\n|EoS|",
      " Reverse the order of words in the sentence.\n|EoS|",
      " Count the vowels in the provided text.\n|EoS|",
      " Suggest a name for a pet turtle.\n|EoS|",
      " Convert the temperature from Fahrenheit to Celsius.\n|EoS|",
      " Describe why leaves change colour in autumn.\n|EoS|",
      " Count the vowels in the provided text.\n|EoS|",
      " Give an antonym for the adjective.\n|EoS|",
      " Write a haiku about rain on a tin roof.\n|EoS|",
      " Pick the odd one out from the list of fruits.\n|EoS|",
      " Tell me how many legs a spider has.\n|EoS|",
      " Detect the language of the sentence.\n|EoS|",
      " Recommend a board game for four players.\n|EoS|"};
  const json a_instances = {
      " [10, 92, 2, 5, -4, 92, 5, 101]\noutput: [-4, 2, 5, 5, 10, 92, 92, 101]\n|EoS|",
      " the cat sat\noutput: sat cat the\n|EoS|",
      " 85 F\n|EoS|",
      " hello world\noutput: 3\n|EoS|",
      " hot\noutput: cold\n|EoS|"};
  const json b_instances = {" Eight legs.\n|EoS|", " Catan is a good choice.\n|EoS|",
                            " \n|EoS|", " Rain drums softly\n|EoS|"};
  const json aux1_outputs = {" [-4, 2, 5, 5, 10, 92, 92, 101]\n|EoS|", " eight legs",
                             " sat the cat", " cold", " 3", " blue whale"};
  const json aux2_outputs = {" [-4, 2, 5, 10, 101, 92, 92]", " Spiders have eight legs.",
                             " unrelated words", " cold weather", " three"};
  return {
      {"seed_path", seed_path.string()},
      {"out_dir", out_dir.string()},
      {"rng_seed", rng_seed},
      {"threshold", 0.01},
      {"targets", {{"A", 5}, {"B", 4}}},
      {"parallelism", 2},
      {"include_seeds", true},
      {"roles", {{"generator", "gen"}, {"aux1", "aux-ilm"}, {"aux2", "aux-lm"}}},
      {"backends",
       json::array(
           {{{"name", "gen"},
             {"kind", "mock"},
             {"model_id", "scripted-generator"},
             {"script",
              json::array({{{"match", "suffix"}, {"pattern", "instruction:"},
                            {"completions", instructions}},
                           {{"match", "suffix"}, {"pattern", "input:"},
                            {"completions", a_instances}},
                           {{"match", "suffix"}, {"pattern", "output:"},
                            {"completions", b_instances}}})}},
            {{"name", "aux-ilm"},
             {"kind", "mock"},
             {"instructed", true},
             {"script", json::array({{{"match", "suffix"}, {"pattern", "output:"},
                                      {"completions", aux1_outputs}}})}},
            {{"name", "aux-lm"},
             {"kind", "mock"},
             {"instructed", false},
             {"script", json::array({{{"match", "suffix"}, {"pattern", "output:"},
                                      {"completions", aux2_outputs}}})}}})}};
}

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  const auto base = std::filesystem::temp_directory_path();
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto candidate = base / ("einst-test-" + std::to_string(::getpid()) + "-" +
                             std::to_string(counter++) + "-" + std::to_string(rd() % 100000));
    if (std::filesystem::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("cannot create a temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

CommandResult run_command(const std::string& command) {
  CommandResult result;
  FILE* pipe = ::popen((command + " 2>&1").c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed for " + command);
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) result.out.append(buf.data(), n);
  const int raw = ::pclose(pipe);
  result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return result;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace einst::fixtures
