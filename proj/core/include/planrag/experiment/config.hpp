#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "planrag/backends/http.hpp"
#include "planrag/corpus/synthetic_world.hpp"
#include "planrag/pipeline/types.hpp"

namespace planrag::experiment {

enum class BackendMode {
  kSynthetic,  // offline world: scripted generator, local search, oracle QA and entailment
  kLive,       // HTTP endpoints; search may instead come from a local corpus directory
};

struct BackendConfig {
  BackendMode mode = BackendMode::kSynthetic;
  std::optional<backends::HttpEndpoint> generate;
  std::optional<backends::HttpEndpoint> search;
  std::optional<backends::HttpEndpoint> qa;
  std::optional<backends::HttpEndpoint> entail;
  std::string corpus_dir;  // live mode: local tf-idf search instead of a search endpoint
  std::size_t max_prompt_chars = 30000;
};

struct StrategyRow {
  std::string label;
  pipeline::PipelineConfig config;
};

struct ExperimentConfig {
  std::string dataset;                            // entity list; unused in synthetic mode
  std::optional<corpus::WorldParams> synthetic;   // world for synthetic mode (defaults when absent)
  BackendConfig backends;
  std::vector<StrategyRow> strategy_rows;         // custom rows; built-in labels are always available
  std::vector<std::string> strategies;            // labels to run, in table order
  std::optional<int> num_runs;                    // overrides every row when set
  std::uint64_t base_seed = 0;
  double nli_threshold = 0.5;
  std::string output_dir = "out";
  std::string cache_dir;                          // empty disables the response cache
  int concurrency = 4;
  std::string templates_dir;                      // empty uses the built-in prompts

  /// Throws CONFIG_INVALID.
  void validate() const;
};

/// NO_RETRIEVAL, ONE_RETRIEVAL, ONE_RETRIEVAL_2X, PLAN_VAR_A, PLAN_VAR_B and
/// the ablation rows PLAN_VAR_B_NO_SECOND_SEARCH, PLAN_VAR_B_NO_UNANSWERABLE,
/// PLAN_VAR_A_NO_PLAN.
const std::vector<StrategyRow>& builtin_strategy_rows();

/// Custom rows shadow built-ins. Applies the num_runs override. Throws
/// CONFIG_INVALID naming an unknown label.
StrategyRow resolve_strategy(const ExperimentConfig& config, const std::string& label);

/// Lowercase label used for record directories.
std::string strategy_slug(const std::string& label);

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);

/// Parses a JSON config file. Relative paths inside it resolve against the
/// file's directory. Throws FILE_NOT_FOUND or CONFIG_INVALID.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Default synthetic world with the four main strategies.
ExperimentConfig demo_config();

}  // namespace planrag::experiment
