#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "einst/config.hpp"
#include "einst/dataset_store.hpp"
#include "einst/lm_gateway.hpp"
#include "einst/seed_corpus.hpp"
#include "json.hpp"

namespace einst {

// File names inside out_dir.
namespace artifacts {
inline constexpr std::string_view kInstructions = "instructions.jsonl";
inline constexpr std::string_view kInstances = "instances.jsonl";
inline constexpr std::string_view kRejections = "instance_rejections.jsonl";
inline constexpr std::string_view kDecisions = "ensemble_decisions.jsonl";
inline constexpr std::string_view kDataset = "dataset.jsonl";
inline constexpr std::string_view kStatsJson = "stats.json";
inline constexpr std::string_view kStatsText = "stats.txt";
}  // namespace artifacts

// Stage manifest file name, e.g. "gen-instances.manifest.json".
std::string manifest_name(std::string_view stage);

// Reads the three stage manifests in out_dir and writes stats.json and
// stats.txt there. Rows are "type A", "type B" and "total".
nlohmann::json run_stats(const std::filesystem::path& out_dir);

// Runs the generation stages against one config. Stages talk only through
// files in out_dir; each one writes a manifest with the config hash, rng
// seed, backends, input/output checksums and counts, and later stages
// refuse inputs whose checksum no longer matches.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);
  // Uses the given backends instead of building them from the config.
  Pipeline(PipelineConfig config, std::map<std::string, std::shared_ptr<Backend>> backends);

  const PipelineConfig& config() const { return config_; }
  std::filesystem::path path(std::string_view artifact) const;

  // Each returns the manifest it wrote.
  nlohmann::json gen_instructions();
  nlohmann::json gen_instances();
  nlohmann::json ensemble();
  // Reads the three manifests; writes stats.json and stats.txt.
  nlohmann::json stats();
  // All of the above in order; returns the stats document.
  nlohmann::json build();

  // Examples kept by the last ensemble() call, seeds excluded.
  const DatasetStore& dataset() const { return dataset_; }

 private:
  Backend& backend(const std::string& name);
  const SeedPool& seeds();
  nlohmann::json backend_info(std::initializer_list<std::string> names) const;
  // Checks that the artifact exists and matches the checksum the producing
  // stage recorded. Throws StageInputError otherwise.
  nlohmann::json checked_input(std::string_view producer, std::string_view artifact) const;
  nlohmann::json write_manifest(std::string_view stage, nlohmann::json inputs,
                                std::initializer_list<std::string_view> outputs,
                                nlohmann::json backends, nlohmann::json counts) const;

  PipelineConfig config_;
  std::map<std::string, std::shared_ptr<Backend>> backends_;
  std::unique_ptr<SeedPool> seeds_;
  DatasetStore dataset_;
};

}  // namespace einst
