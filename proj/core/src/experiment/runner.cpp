#include "planrag/experiment/runner.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "planrag/backends/http.hpp"
#include "planrag/corpus/document_index.hpp"
#include "planrag/corpus/entity_list.hpp"
#include "planrag/corpus/synthetic_world.hpp"
#include "planrag/error.hpp"
#include "planrag/metrics/attribution.hpp"

namespace planrag::experiment {
namespace {

namespace fs = std::filesystem;
using pipeline::RunRecord;

void write_file(const fs::path& path, const std::string& content) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kConfigInvalid, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::kConfigInvalid, "failed writing " + path.string());
}

std::string record_key(const RunRecord& r) { return fmt::format("{}\n{}", r.entity.rendered(), r.seed); }

metrics::ReportTable build_table(const std::vector<std::string>& labels, const std::vector<metrics::MetricRow>& rows) {
  metrics::ReportTable table;
  for (const auto& label : labels) {
    std::vector<metrics::MetricRow> mine;
    for (const auto& r : rows) {
      if (r.strategy == label) mine.push_back(r);
    }
    if (mine.empty()) continue;
    table.emplace_back(label, metrics::aggregate(mine));
  }
  return table;
}

std::string rows_jsonl(const std::vector<metrics::MetricRow>& rows) {
  std::string out;
  for (const auto& r : rows) out += metrics::row_to_json(r).dump() + "\n";
  return out;
}

std::string errors_log(const std::vector<TrialFailure>& failures) {
  std::string out;
  for (const auto& f : failures) out += fmt::format("{}\t{}\tseed={}\t{}\n", f.strategy, f.entity, f.seed, f.message);
  return out;
}

void write_records(const fs::path& dir, const std::vector<RunRecord>& records) {
  // Distinct entities sharing a slug get numbered suffixes in first-seen order.
  std::map<std::string, std::string> slug_of;
  std::map<std::string, int> taken;
  for (const auto& r : records) {
    const auto name = r.entity.rendered();
    if (slug_of.count(name)) continue;
    auto slug = entity_slug(r.entity);
    if (const int n = taken[slug]++; n > 0) slug += fmt::format("-{}", n + 1);
    slug_of[name] = slug;
  }
  for (const auto& r : records) {
    const auto path = dir / "records" / strategy_slug(r.strategy) /
                      fmt::format("{}__seed{}.json", slug_of[r.entity.rendered()], r.seed);
    write_file(path, nlohmann::json(r).dump(2) + "\n");
  }
}

void write_reports(const fs::path& dir, const metrics::ReportTable& table, const std::vector<metrics::MetricRow>& rows) {
  write_file(dir / "rows.jsonl", rows_jsonl(rows));
  write_file(dir / "report.csv", metrics::format_csv(table));
  write_file(dir / "report.md", metrics::format_markdown(table, "Results"));
}

RunSummary run_rows(const Environment& env, const std::vector<StrategyRow>& rows) {
  auto results = execute_trials(env, rows);
  RunSummary s;
  s.records = std::move(results.records);
  s.failures = std::move(results.failures);
  for (const auto& r : s.records) s.rows.push_back(metrics::score_run(r));
  std::vector<std::string> labels;
  for (const auto& row : rows) labels.push_back(row.label);
  s.table = build_table(labels, s.rows);
  s.inner_calls = env.inner_calls();
  s.exit_code = s.failures.empty() ? 0 : 2;

  const fs::path out = env.config.output_dir;
  write_records(out, s.records);
  write_reports(out, s.table, s.rows);
  write_file(out / "errors.log", errors_log(s.failures));
  for (const auto& f : s.failures) spdlog::warn("trial failed: {} / {} / seed {}: {}", f.strategy, f.entity, f.seed, f.message);
  return s;
}

}  // namespace

BackendCallCounts Environment::inner_calls() const {
  return {inner.generator->calls(), inner.search->calls(), inner.qa->calls(), inner.entail->calls()};
}

std::string entity_slug(const pipeline::EntityQuery& entity) {
  std::string out;
  for (char c : entity.rendered()) {
    if (c >= 'A' && c <= 'Z') out.push_back(static_cast<char>(c - 'A' + 'a'));
    else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) out.push_back(c);
    else if (!out.empty() && out.back() != '-') out.push_back('-');
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out.empty() ? "entity" : out;
}

std::unique_ptr<Environment> make_environment(const ExperimentConfig& config) {
  config.validate();
  auto env = std::make_unique<Environment>();
  env->config = config;

  if (config.backends.mode == BackendMode::kSynthetic) {
    const auto world = corpus::build_synthetic_world(config.synthetic.value_or(corpus::WorldParams{}));
    env->entities = world.entity_queries();
    env->inner = world.backends();
  } else {
    env->entities = corpus::load_entity_list(config.dataset);
    const auto& b = config.backends;
    env->inner.generator = std::make_shared<backends::HttpGenerator>(*b.generate, b.max_prompt_chars);
    if (!b.corpus_dir.empty()) {
      env->inner.search = std::make_shared<corpus::LocalSearchEngine>(
          std::make_shared<const corpus::DocumentIndex>(corpus::DocumentIndex::load_directory(b.corpus_dir)));
    } else {
      env->inner.search = std::make_shared<backends::HttpSearchEngine>(*b.search);
    }
    env->inner.qa = std::make_shared<backends::HttpQuestionAnswerer>(*b.qa);
    env->inner.entail = std::make_shared<backends::HttpEntailmentScorer>(*b.entail);
  }
  if (env->entities.empty()) throw Error(ErrorCode::kConfigInvalid, "dataset has no entities");

  auto outer = env->inner;
  if (!config.cache_dir.empty()) {
    outer = backends::with_cache(outer, std::make_shared<backends::ResponseCache>(config.cache_dir));
  }
  outer.entail = std::make_shared<metrics::MemoizedEntailment>(outer.entail);
  env->context.backends = outer;
  env->context.prompts =
      config.templates_dir.empty() ? pipeline::PromptLibrary() : pipeline::PromptLibrary::from_directory(config.templates_dir);
  env->context.attribution.nli_threshold = config.nli_threshold;
  return env;
}

TrialResults execute_trials(const Environment& env, const std::vector<StrategyRow>& rows) {
  struct Trial {
    const StrategyRow* row;
    const pipeline::EntityQuery* entity;
    std::uint64_t seed;
  };
  std::vector<Trial> trials;
  for (const auto& row : rows) {
    for (const auto& entity : env.entities) {
      for (int r = 0; r < row.config.num_runs; ++r) {
        trials.push_back({&row, &entity, env.config.base_seed + static_cast<std::uint64_t>(r)});
      }
    }
  }

  std::vector<std::optional<RunRecord>> done(trials.size());
  std::vector<std::optional<std::string>> errors(trials.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < trials.size(); i = next++) {
      const auto& t = trials[i];
      auto cfg = t.row->config;
      cfg.sampling.seed = t.seed;
      try {
        done[i] = pipeline::run_strategy(t.row->label, *t.entity, cfg, env.context);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(env.config.concurrency), trials.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  TrialResults out;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (done[i]) out.records.push_back(std::move(*done[i]));
    else out.failures.push_back({trials[i].row->label, trials[i].entity->rendered(), trials[i].seed, *errors[i]});
  }
  return out;
}

RunSummary run_experiment(const ExperimentConfig& config) {
  const auto env = make_environment(config);
  std::vector<StrategyRow> rows;
  for (const auto& label : config.strategies) rows.push_back(resolve_strategy(config, label));
  return run_rows(*env, rows);
}

AblationSummary run_ablations(const ExperimentConfig& config) {
  const std::vector<std::string> labels = {"ONE_RETRIEVAL", "PLAN_VAR_A", "PLAN_VAR_A_NO_PLAN", "PLAN_VAR_B",
                                           "PLAN_VAR_B_NO_SECOND_SEARCH", "PLAN_VAR_B_NO_UNANSWERABLE"};
  auto cfg = config;
  cfg.strategies = labels;
  const auto env = make_environment(cfg);
  std::vector<StrategyRow> rows;
  for (const auto& label : labels) rows.push_back(resolve_strategy(cfg, label));

  AblationSummary s;
  s.run = run_rows(*env, rows);
  const auto pick = [&](std::initializer_list<const char*> names) {
    metrics::ReportTable t;
    for (const char* n : names) {
      for (const auto& entry : s.run.table) {
        if (entry.first == n) t.push_back(entry);
      }
    }
    return t;
  };
  s.tables.emplace_back("second_search", pick({"PLAN_VAR_B", "PLAN_VAR_B_NO_SECOND_SEARCH"}));
  s.tables.emplace_back("unanswerable", pick({"PLAN_VAR_B", "PLAN_VAR_B_NO_UNANSWERABLE"}));
  s.tables.emplace_back("outline", pick({"PLAN_VAR_A", "PLAN_VAR_A_NO_PLAN"}));

  // Expanded evidence: ONE_RETRIEVAL rescored against its pool plus the
  // PLAN_VAR_B pool of the same entity and seed.
  std::map<std::string, const RunRecord*> var_b;
  for (const auto& r : s.run.records) {
    if (r.strategy == "PLAN_VAR_B") var_b[record_key(r)] = &r;
  }
  const std::string expanded_label = "ONE_RETRIEVAL_EXPANDED";
  std::vector<metrics::MetricRow> expanded;
  for (const auto& r : s.run.records) {
    if (r.strategy != "ONE_RETRIEVAL") continue;
    const auto it = var_b.find(record_key(r));
    if (it == var_b.end()) continue;
    const auto extra = it->second->evidence.passages();
    auto row = metrics::rescore_run(r, extra, *env->context.backends.entail, env->context.attribution);
    row.strategy = expanded_label;
    expanded.push_back(std::move(row));
  }
  metrics::ReportTable evidence_table = pick({"ONE_RETRIEVAL"});
  if (!expanded.empty()) evidence_table.emplace_back(expanded_label, metrics::aggregate(expanded));
  for (const auto& entry : pick({"PLAN_VAR_B"})) evidence_table.push_back(entry);
  s.tables.emplace_back("expanded_evidence", evidence_table);

  const fs::path out = cfg.output_dir;
  const std::map<std::string, std::string> titles = {
      {"second_search", "Second search"},
      {"unanswerable", "Unanswerable marking"},
      {"outline", "Outline"},
      {"expanded_evidence", "Expanded evidence"}};
  std::string md;
  for (const auto& [name, table] : s.tables) {
    write_file(out / fmt::format("ablation_{}.csv", name), metrics::format_csv(table));
    if (!md.empty()) md += "\n";
    md += metrics::format_markdown(table, titles.at(name));
  }
  write_file(out / "ablations.md", md);
  write_file(out / "rows_expanded.jsonl", rows_jsonl(expanded));
  s.run.inner_calls = env->inner_calls();
  return s;
}

std::vector<RunRecord> load_records(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kFileNotFound, "records directory " + dir.string() + " not found");
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RunRecord> out;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    try {
      out.push_back(nlohmann::json::parse(in).get<RunRecord>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, f.string() + ": " + e.what());
    }
  }
  return out;
}

RunSummary score_records(const ExperimentConfig& config, const ScoreOptions& options) {
  const auto env = make_environment(config);
  const auto records = load_records(options.records_dir);
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "no records under " + options.records_dir.string());

  std::map<std::string, std::vector<std::string>> extra_by_key;
  if (options.evidence_dir) {
    for (const auto& r : load_records(*options.evidence_dir)) {
      auto& extra = extra_by_key[record_key(r)];
      for (auto& p : r.evidence.passages()) extra.push_back(std::move(p));
    }
  }

  RunSummary s;
  std::vector<std::string> labels;
  for (const auto& r : records) {
    if (std::find(labels.begin(), labels.end(), r.strategy) == labels.end()) labels.push_back(r.strategy);
    const auto it = extra_by_key.find(record_key(r));
    const std::vector<std::string> none;
    const auto& extra = it == extra_by_key.end() ? none : it->second;
    s.rows.push_back(metrics::rescore_run(r, extra, *env->context.backends.entail, env->context.attribution));
  }
  s.table = build_table(labels, s.rows);
  s.records = records;
  s.inner_calls = env->inner_calls();
  write_reports(options.output_dir, s.table, s.rows);
  return s;
}

}  // namespace planrag::experiment
