#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "einst/rng.hpp"
#include "einst/seed_corpus.hpp"
#include "json.hpp"

namespace einst::fixtures {

// Synthetic seed tasks: ids "sa-0001".. (type A) and "sb-0001".. (type B).
// Their wording never overlaps random_instruction's vocabulary.
std::vector<SeedTask> seed_tasks(std::size_t type_a, std::size_t type_b);
SeedPool seed_pool(std::size_t type_a = 125, std::size_t type_b = 50);
// Flat-shape JSONL seed file.
void write_seed_file(const std::filesystem::path& path, std::size_t type_a, std::size_t type_b);

// `words` tokens drawn from a 4096-word vocabulary ("w0".."w4095").
std::string random_instruction(Rng& rng, std::size_t words = 8);

// Mock responder for instruction prompts: a fresh random instruction per
// call, except every dup_every-th call (0 = never) repeats the first demo
// instruction found in the prompt.
std::function<std::string(std::string_view)> instruction_responder(std::uint64_t seed,
                                                                    std::size_t dup_every);

// Config for a run where all three roles are scripted mocks. Targets are
// small; the seed file needs at least 24 type-A and 15 type-B tasks.
nlohmann::json mock_config(const std::filesystem::path& seed_path,
                           const std::filesystem::path& out_dir, std::uint64_t rng_seed = 7);

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

struct CommandResult {
  int status = -1;
  std::string out;  // stdout and stderr together
};

// Runs a shell command and captures its output.
CommandResult run_command(const std::string& command);

std::string read_text(const std::filesystem::path& path);

}  // namespace einst::fixtures
