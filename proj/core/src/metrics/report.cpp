#include "planrag/metrics/report.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "planrag/error.hpp"
#include "planrag/textproc.hpp"

namespace planrag::metrics {
namespace {

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> expanded_passages(const pipeline::RunRecord& record,
                                           std::span<const std::string> extra_passages) {
  auto passages = record.evidence.passages();
  std::set<std::string> present(passages.begin(), passages.end());
  for (const auto& p : extra_passages) {
    if (present.insert(p).second) passages.push_back(p);
  }
  return passages;
}

}  // namespace

std::size_t MetricRow::n_attributed() const {
  return static_cast<std::size_t>(std::count(attribution.begin(), attribution.end(), true));
}

std::string rouge_reference(std::span<const std::string> passages) {
  std::string out;
  for (const auto& p : passages) {
    if (!out.empty()) out.push_back('\n');
    out += p;
  }
  return out;
}

MetricRow score_run(const pipeline::RunRecord& record, std::span<const std::string> extra_passages) {
  if (record.attribution.size() != record.sentences.size()) {
    throw Error(ErrorCode::kInvalidArgument, "record attribution is not aligned with its sentences");
  }
  const auto passages = expanded_passages(record, extra_passages);
  const std::string reference = rouge_reference(passages);

  MetricRow row;
  row.strategy = record.strategy;
  row.entity = record.entity.rendered();
  row.seed = record.seed;
  row.attribution = record.attribution;
  row.rouge1_p = rouge_n_precision(record.output, reference, 1);
  row.rouge2_p = rouge_n_precision(record.output, reference, 2);
  row.rougeL_p = rouge_lsum_precision(record.output, reference);
  row.length_tokens = textproc::tokenize(record.output).size();
  for (std::size_t n = 1; n <= 3; ++n) row.uniqueness[n - 1] = ngram_uniqueness(record.output, n);
  return row;
}

MetricRow rescore_run(const pipeline::RunRecord& record, std::span<const std::string> extra_passages,
                      backends::EntailmentScorer& scorer, const AttributionOptions& options) {
  pipeline::RunRecord rescored = record;
  const auto passages = expanded_passages(record, extra_passages);
  rescored.attribution = attribute_sentences(rescored.sentences, passages, scorer, options);
  return score_run(rescored, extra_passages);
}

MetricReport aggregate(const std::vector<MetricRow>& rows) {
  if (rows.empty()) throw Error(ErrorCode::kEmptyInput, "no metric rows to aggregate");

  std::map<std::string, std::vector<const MetricRow*>> by_entity;
  for (const auto& r : rows) by_entity[r.entity].push_back(&r);

  std::vector<double> strict, macro, r1, r2, rl, length;
  std::array<std::vector<double>, 3> uniq;
  MetricReport report;
  report.n_records = rows.size();

  for (auto& [entity, group] : by_entity) {
    std::sort(group.begin(), group.end(), [](const MetricRow* a, const MetricRow* b) { return a->seed < b->seed; });
    std::vector<std::vector<bool>> vectors;
    std::vector<double> e_r1, e_r2, e_rl, e_len;
    std::array<std::vector<double>, 3> e_uniq;
    for (const auto* r : group) {
      if (!r->attribution.empty()) vectors.push_back(r->attribution);
      e_r1.push_back(r->rouge1_p);
      e_r2.push_back(r->rouge2_p);
      e_rl.push_back(r->rougeL_p);
      e_len.push_back(static_cast<double>(r->length_tokens));
      for (std::size_t n = 0; n < 3; ++n) {
        if (r->uniqueness[n].defined) e_uniq[n].push_back(r->uniqueness[n].value);
      }
    }
    if (!vectors.empty()) {
      const auto ais = ais_aggregate(vectors);
      strict.push_back(ais.strict);
      macro.push_back(ais.macro);
      report.ais.n_outputs += ais.n_outputs;
      report.ais.n_sentences += ais.n_sentences;
      report.ais.n_attributed += ais.n_attributed;
    }
    r1.push_back(mean(e_r1));
    r2.push_back(mean(e_r2));
    rl.push_back(mean(e_rl));
    length.push_back(mean(e_len));
    for (std::size_t n = 0; n < 3; ++n) {
      if (!e_uniq[n].empty()) uniq[n].push_back(mean(e_uniq[n]));
    }
  }

  report.ais.strict = mean(strict);
  report.ais.macro = mean(macro);
  report.ais.micro = report.ais.n_sentences == 0 ? 0.0
                                                 : static_cast<double>(report.ais.n_attributed) /
                                                       static_cast<double>(report.ais.n_sentences);
  report.rouge1_p = mean(r1);
  report.rouge2_p = mean(r2);
  report.rougeL_p = mean(rl);
  report.mean_length_tokens = mean(length);
  for (std::size_t n = 0; n < 3; ++n) report.ngram_uniqueness[static_cast<int>(n) + 1] = uniq[n].empty() ? 1.0 : mean(uniq[n]);
  return report;
}

nlohmann::json row_to_json(const MetricRow& row) {
  nlohmann::json attribution = nlohmann::json::array();
  for (bool b : row.attribution) attribution.push_back(b);
  nlohmann::json uniq = nlohmann::json::object();
  for (std::size_t n = 0; n < 3; ++n) {
    uniq[std::to_string(n + 1)] = row.uniqueness[n].defined ? nlohmann::json(row.uniqueness[n].value) : nlohmann::json(nullptr);
  }
  return {{"strategy", row.strategy},
          {"entity", row.entity},
          {"seed", row.seed},
          {"attribution", attribution},
          {"n_sentences", row.attribution.size()},
          {"n_attributed", row.n_attributed()},
          {"rouge1_p", row.rouge1_p},
          {"rouge2_p", row.rouge2_p},
          {"rougeL_p", row.rougeL_p},
          {"length_tokens", row.length_tokens},
          {"ngram_uniqueness", uniq}};
}

std::string format_csv(const ReportTable& table) {
  std::string out =
      "strategy,n_records,strict_ais,macro_ais,micro_ais,rouge1_p,rouge2_p,rougeL_p,length,uniq1,uniq2,uniq3\n";
  for (const auto& [label, r] : table) {
    out += fmt::format("{},{},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f},{:.2f},{:.4f},{:.4f},{:.4f}\n",
                       csv_field(label), r.n_records, r.ais.strict, r.ais.macro, r.ais.micro, r.rouge1_p, r.rouge2_p,
                       r.rougeL_p, r.mean_length_tokens, r.ngram_uniqueness.at(1), r.ngram_uniqueness.at(2),
                       r.ngram_uniqueness.at(3));
  }
  return out;
}

std::string format_markdown(const ReportTable& table, const std::string& title) {
  const std::vector<std::string> header = {"Method", "Strict", "Macro", "Micro", "R1", "R2", "RL", "# Tokens"};
  std::vector<std::vector<std::string>> cells;
  for (const auto& [label, r] : table) {
    cells.push_back({label, fmt::format("{:.2f}", 100 * r.ais.strict), fmt::format("{:.2f}", 100 * r.ais.macro),
                     fmt::format("{:.2f}", 100 * r.ais.micro), fmt::format("{:.2f}", 100 * r.rouge1_p),
                     fmt::format("{:.2f}", 100 * r.rouge2_p), fmt::format("{:.2f}", 100 * r.rougeL_p),
                     fmt::format("{:.2f}", r.mean_length_tokens)});
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  const auto line = [&](const std::vector<std::string>& row) {
    std::string s = "|";
    for (std::size_t c = 0; c < row.size(); ++c) {
      s += c == 0 ? fmt::format(" {:<{}} |", row[c], width[c]) : fmt::format(" {:>{}} |", row[c], width[c]);
    }
    return s + "\n";
  };

  std::string out;
  if (!title.empty()) out += "## " + title + "\n\n";
  out += line(header);
  out += "|";
  for (std::size_t c = 0; c < header.size(); ++c) {
    out += c == 0 ? " :" + std::string(width[c] - 1, '-') + " |" : " " + std::string(width[c] - 1, '-') + ": |";
  }
  out += "\n";
  for (const auto& row : cells) out += line(row);
  return out;
}

}  // namespace planrag::metrics
