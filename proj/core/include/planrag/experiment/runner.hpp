#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "planrag/backends/cache.hpp"
#include "planrag/experiment/config.hpp"
#include "planrag/metrics/report.hpp"
#include "planrag/pipeline/strategies.hpp"

namespace planrag::experiment {

struct BackendCallCounts {
  std::size_t generate = 0;
  std::size_t search = 0;
  std::size_t qa = 0;
  std::size_t entail = 0;

  std::size_t total() const { return generate + search + qa + entail; }
};

/// Entities, backends and prompts for one experiment. `inner` holds the
/// uncached backends; `context.backends` is what trials call.
struct Environment {
  ExperimentConfig config;
  std::vector<pipeline::EntityQuery> entities;
  backends::BackendSet inner;
  pipeline::PipelineContext context;

  /// Calls that reached the uncached backends so far.
  BackendCallCounts inner_calls() const;
};

/// Throws CONFIG_INVALID (after validate()), FILE_NOT_FOUND or PARSE_ERROR.
std::unique_ptr<Environment> make_environment(const ExperimentConfig& config);

struct TrialFailure {
  std::string strategy;
  std::string entity;
  std::uint64_t seed = 0;
  std::string message;
};

struct TrialResults {
  std::vector<pipeline::RunRecord> records;  // strategy, entity, seed order
  std::vector<TrialFailure> failures;
};

/// strategies x entities x seeds on a pool of config.concurrency workers.
/// Result order is independent of completion order.
TrialResults execute_trials(const Environment& env, const std::vector<StrategyRow>& rows);

struct RunSummary {
  metrics::ReportTable table;
  std::vector<metrics::MetricRow> rows;
  std::vector<pipeline::RunRecord> records;
  std::vector<TrialFailure> failures;
  BackendCallCounts inner_calls;
  int exit_code = 0;  // 0 ok, 2 when some trials failed
};

/// Writes records/<strategy>/<entity>__seed<n>.json, rows.jsonl, report.csv,
/// report.md and errors.log under config.output_dir.
RunSummary run_experiment(const ExperimentConfig& config);

struct AblationSummary {
  RunSummary run;  // every strategy the ablations need
  std::vector<std::pair<std::string, metrics::ReportTable>> tables;
};

/// Paired tables: second search, unanswerable marking, outline, and
/// expanded-evidence rescoring of ONE_RETRIEVAL against the union with the
/// PLAN_VAR_B pool of the same entity and seed. Writes the run artifacts
/// plus ablations.md and ablation_<name>.csv. config.strategies is ignored.
AblationSummary run_ablations(const ExperimentConfig& config);

struct ScoreOptions {
  std::filesystem::path records_dir;
  std::optional<std::filesystem::path> evidence_dir;  // records whose pools extend the evidence
  std::filesystem::path output_dir;
};

/// Rescores stored records at config.nli_threshold with the configured
/// entailment backend. With an evidence directory each record's pool is
/// extended by the pools of records there with the same entity and seed.
/// Writes rows.jsonl, report.csv and report.md.
RunSummary score_records(const ExperimentConfig& config, const ScoreOptions& options);

std::vector<pipeline::RunRecord> load_records(const std::filesystem::path& dir);

std::string entity_slug(const pipeline::EntityQuery& entity);

}  // namespace planrag::experiment
