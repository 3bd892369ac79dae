// ensemble-instruct command line: generation stages, stats and evaluation.
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "einst/config.hpp"
#include "einst/dataset_store.hpp"
#include "einst/error.hpp"
#include "einst/evaluator.hpp"
#include "einst/jsonl.hpp"
#include "einst/pipeline.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

// Leftover "--key value" / "--key=value" pairs become config overrides, so
// every config key (dotted for nested ones) can be set from the command line.
std::vector<std::pair<std::string, std::string>> parse_overrides(
    const std::vector<std::string>& extras) {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const auto& arg = extras[i];
    if (arg.rfind("--", 0) != 0 || arg.size() == 2) {
      throw einst::ConfigError("unexpected argument '" + arg + "'");
    }
    auto key = arg.substr(2);
    if (auto eq = key.find('='); eq != std::string::npos) {
      out.emplace_back(key.substr(0, eq), key.substr(eq + 1));
      continue;
    }
    if (i + 1 >= extras.size()) throw einst::ConfigError("--" + key + " needs a value");
    out.emplace_back(key, extras[++i]);
  }
  return out;
}

void print_error(std::string_view category, const std::string& message) {
  std::cerr << json{{"error", {{"category", category}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("einst");
  spdlog::set_default_logger(logger);

  CLI::App app{"Synthetic instruction data generation with output ensembling"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  std::string config_path;
  auto stage = [&](const char* name, const char* help) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("--config", config_path, "JSON run config")->required()->check(CLI::ExistingFile);
    cmd->allow_extras();
    return cmd;
  };
  auto* gen_instructions = stage("gen-instructions", "propose and deduplicate instructions");
  auto* gen_instances = stage("gen-instances", "write one instance per instruction");
  auto* ensemble = stage("ensemble", "ensemble outputs and write the dataset");
  auto* build = stage("build", "run all stages and print statistics");

  auto* stats = app.add_subcommand("stats", "print the instructions / valid / ensembled row");
  std::string stats_dir;
  std::optional<std::size_t> n_instructions, n_valid, n_ensembled;
  stats->add_option("--out-dir", stats_dir, "run directory holding the stage manifests");
  stats->add_option("--config", config_path, "JSON run config (its out_dir is used)");
  stats->add_option("--instructions", n_instructions, "instruction count");
  stats->add_option("--valid", n_valid, "valid instance count");
  stats->add_option("--ensembled", n_ensembled, "count kept by the ensemble");
  stats->allow_extras();

  auto* eval = app.add_subcommand("eval", "Rouge-L of predictions against references");
  std::string predictions, references, report_path;
  eval->add_option("--predictions", predictions, "JSONL {task_id, instance_id, prediction}")
      ->required();
  eval->add_option("--references", references, "JSONL {task_id, instance_id, references}")
      ->required();
  eval->add_option("--report", report_path, "write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_error("usage", e.what());
    return 2;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    auto load = [&](CLI::App* cmd) {
      return einst::load_config(config_path, parse_overrides(cmd->remaining()));
    };
    if (gen_instructions->parsed()) {
      einst::Pipeline p(load(gen_instructions));
      std::cout << p.gen_instructions()["counts"].dump(2) << '\n';
    } else if (gen_instances->parsed()) {
      einst::Pipeline p(load(gen_instances));
      std::cout << p.gen_instances()["counts"].dump(2) << '\n';
    } else if (ensemble->parsed()) {
      einst::Pipeline p(load(ensemble));
      std::cout << p.ensemble()["counts"].dump(2) << '\n';
    } else if (build->parsed()) {
      einst::Pipeline p(load(build));
      p.build();
      std::cout << einst::jsonl::read_file(p.path(einst::artifacts::kStatsText));
    } else if (stats->parsed()) {
      const bool explicit_counts = n_instructions || n_valid || n_ensembled;
      if (explicit_counts) {
        if (!n_instructions || !n_valid || !n_ensembled) {
          throw einst::ConfigError("--instructions, --valid and --ensembled go together");
        }
        const auto s = einst::compute_stats(*n_instructions, *n_valid, *n_ensembled);
        std::cout << einst::format_stats_table({{"run", s}});
      } else {
        std::filesystem::path dir = stats_dir;
        if (dir.empty()) {
          if (config_path.empty()) throw einst::ConfigError("stats needs --out-dir, --config or counts");
          dir = load(stats).out_dir;
        }
        einst::run_stats(dir);
        std::cout << einst::jsonl::read_file(dir / einst::artifacts::kStatsText);
      }
    } else if (eval->parsed()) {
      const auto report = einst::evaluate(predictions, references);
      if (!report_path.empty()) einst::jsonl::write_file(report_path, report.to_json().dump(2) + "\n");
      std::cout << report.to_text();
    }
  } catch (const einst::Error& e) {
    print_error(einst::to_string(e.category()), e.what());
    return einst::exit_code(e.category());
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return 0;
}
