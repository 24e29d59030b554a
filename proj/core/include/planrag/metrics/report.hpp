#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "planrag/backends/interfaces.hpp"
#include "planrag/metrics/attribution.hpp"
#include "planrag/metrics/scores.hpp"
#include "planrag/pipeline/types.hpp"

namespace planrag::metrics {

/// Metrics for one RunRecord.
struct MetricRow {
  std::string strategy;
  std::string entity;
  std::uint64_t seed = 0;
  std::vector<bool> attribution;
  double rouge1_p = 0.0;
  double rouge2_p = 0.0;
  double rougeL_p = 0.0;
  std::size_t length_tokens = 0;
  std::array<Uniqueness, 3> uniqueness{};  // n = 1, 2, 3

  std::size_t n_attributed() const;
};

struct MetricReport {
  AISScores ais;
  double rouge1_p = 0.0;
  double rouge2_p = 0.0;
  double rougeL_p = 0.0;
  double mean_length_tokens = 0.0;
  std::map<int, double> ngram_uniqueness;  // n -> mean uniqueness
  std::size_t n_records = 0;
};

/// Evidence passages concatenated in pool order, one per line.
std::string rouge_reference(std::span<const std::string> passages);

/// Scores a record using its stored attribution. `extra_passages` extend the
/// ROUGE reference (expanded-evidence mode).
MetricRow score_run(const pipeline::RunRecord& record, std::span<const std::string> extra_passages = {});

/// Expanded-evidence rescoring: recomputes attribution against the record's
/// own pool plus `extra_passages` and scores the result.
MetricRow rescore_run(const pipeline::RunRecord& record, std::span<const std::string> extra_passages,
                      backends::EntailmentScorer& scorer, const AttributionOptions& options = {});

/// Averages within each entity's seed runs first, then across entities.
/// Strict and macro AIS follow that order; micro AIS is the global ratio of
/// attributed to total sentences. Rows without sentences count towards
/// length and ROUGE but not AIS. Throws EMPTY_INPUT for no rows.
MetricReport aggregate(const std::vector<MetricRow>& rows);

nlohmann::json row_to_json(const MetricRow& row);

using ReportTable = std::vector<std::pair<std::string, MetricReport>>;

/// Fractions with four decimals; one row per strategy label.
std::string format_csv(const ReportTable& table);

/// Aligned markdown with percentages, in the layout of a results table.
std::string format_markdown(const ReportTable& table, const std::string& title = "");

}  // namespace planrag::metrics
