#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "planrag/error.hpp"
#include "planrag/experiment/config.hpp"
#include "planrag/experiment/runner.hpp"

namespace {

using namespace planrag::experiment;

struct CommonFlags {
  std::string config;
  bool offline = false;
  std::string cache_dir;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> concurrency;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool config_required) {
  auto* opt = cmd->add_option("--config", f.config, "experiment config (JSON)");
  if (config_required) opt->required();
  cmd->add_flag("--offline", f.offline, "use the offline synthetic-world backends");
  cmd->add_option("--cache-dir", f.cache_dir, "response cache directory");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "base seed; runs use seed, seed+1, ...");
  cmd->add_option("--concurrency", f.concurrency, "worker count")->check(CLI::PositiveNumber);
}

ExperimentConfig resolve(const CommonFlags& f, ExperimentConfig base) {
  auto c = f.config.empty() ? std::move(base) : load_config(f.config);
  if (f.offline) c.backends.mode = BackendMode::kSynthetic;
  if (!f.cache_dir.empty()) c.cache_dir = f.cache_dir;
  if (!f.out.empty()) c.output_dir = f.out;
  if (f.seed) c.base_seed = *f.seed;
  if (f.concurrency) c.concurrency = *f.concurrency;
  return c;
}

void print_summary(const RunSummary& s, const std::string& out_dir) {
  const auto& calls = s.inner_calls;
  std::cout << fmt::format("{} records, {} failed trials; backend calls: generate={} search={} qa={} entail={}\n",
                           s.records.size(), s.failures.size(), calls.generate, calls.search, calls.qa, calls.entail);
  std::cout << "artifacts in " << out_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planrag: plan-guided retrieval experiments"};
  app.require_subcommand(1);

  CommonFlags run_flags, ablate_flags, score_flags, demo_flags;
  auto* run = app.add_subcommand("run", "run the configured strategies and write the comparison table");
  add_common(run, run_flags, true);
  auto* ablate = app.add_subcommand("ablate", "run the ablation tables");
  add_common(ablate, ablate_flags, false);
  auto* score = app.add_subcommand("score", "rescore stored records");
  add_common(score, score_flags, false);
  std::string records_dir, evidence_dir;
  std::optional<double> threshold;
  score->add_option("--records", records_dir, "directory of run records")->required();
  score->add_option("--evidence", evidence_dir, "records whose evidence pools extend each record's pool");
  score->add_option("--threshold", threshold, "entailment threshold")->check(CLI::Range(0.0, 1.0));
  auto* demo = app.add_subcommand("demo", "offline synthetic world, four main strategies");
  add_common(demo, demo_flags, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto cfg = resolve(run_flags, {});
      const auto s = run_experiment(cfg);
      std::cout << planrag::metrics::format_markdown(s.table);
      print_summary(s, cfg.output_dir);
      return s.exit_code;
    }
    if (demo->parsed()) {
      auto cfg = resolve(demo_flags, demo_config());
      cfg.backends.mode = BackendMode::kSynthetic;
      const auto s = run_experiment(cfg);
      std::cout << planrag::metrics::format_markdown(s.table);
      print_summary(s, cfg.output_dir);
      return s.exit_code;
    }
    if (ablate->parsed()) {
      auto base = demo_config();
      base.output_dir = "ablate_out";
      const auto cfg = resolve(ablate_flags, base);
      const auto s = run_ablations(cfg);
      for (const auto& [name, table] : s.tables) std::cout << planrag::metrics::format_markdown(table, name) << "\n";
      print_summary(s.run, cfg.output_dir);
      return s.run.exit_code;
    }
    if (score->parsed()) {
      auto base = demo_config();
      base.output_dir = "score_out";
      auto cfg = resolve(score_flags, base);
      if (threshold) cfg.nli_threshold = *threshold;
      ScoreOptions opts{records_dir, std::nullopt, cfg.output_dir};
      if (!evidence_dir.empty()) opts.evidence_dir = evidence_dir;
      const auto s = score_records(cfg, opts);
      std::cout << planrag::metrics::format_markdown(s.table);
      print_summary(s, cfg.output_dir);
      return s.exit_code;
    }
  } catch (const planrag::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
