#include <random>
#include <string>

#include <benchmark/benchmark.h>

#include "planrag/corpus/synthetic_world.hpp"
#include "planrag/metrics/scores.hpp"
#include "planrag/pipeline/strategies.hpp"
#include "planrag/textproc.hpp"

using namespace planrag;

namespace {

std::string random_text(std::size_t words, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    out += "w" + std::to_string(rng() % 50);
    out += (rng() % 12 == 0) ? ". W1 " : " ";
  }
  return out;
}

void BM_Tokenize(benchmark::State& state) {
  const auto text = random_text(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(textproc::tokenize(text));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Tokenize)->Arg(100)->Arg(1000)->Arg(10000);

void BM_SplitSentences(benchmark::State& state) {
  const auto text = random_text(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(textproc::split_sentences(text));
}
BENCHMARK(BM_SplitSentences)->Arg(1000)->Arg(10000);

void BM_Rouge2(benchmark::State& state) {
  const auto cand = random_text(static_cast<std::size_t>(state.range(0)), 3);
  const auto ref = random_text(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::rouge_n_precision(cand, ref, 2));
}
BENCHMARK(BM_Rouge2)->Arg(100)->Arg(1000);

// Quadratic in length through the LCS table.
void BM_RougeLsum(benchmark::State& state) {
  const auto cand = random_text(static_cast<std::size_t>(state.range(0)), 5);
  const auto ref = random_text(static_cast<std::size_t>(state.range(0)), 6);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::rouge_lsum_precision(cand, ref));
}
BENCHMARK(BM_RougeLsum)->Arg(100)->Arg(1000);

void BM_LocalSearch(benchmark::State& state) {
  corpus::WorldParams p;
  p.n_entities = static_cast<int>(state.range(0));
  const auto world = corpus::build_synthetic_world(p);
  const auto index = world.index();
  const auto& e = world.entities.front();
  const std::string query = e.aspects.back().question;
  for (auto _ : state) benchmark::DoNotOptimize(index->search(query, 5));
}
BENCHMARK(BM_LocalSearch)->Arg(8)->Arg(200);

void BM_PlanVarBTrial(benchmark::State& state) {
  const auto world = corpus::build_synthetic_world({});
  pipeline::PipelineContext ctx;
  ctx.backends = world.backends();
  pipeline::PipelineConfig cfg;
  cfg.variant = pipeline::Variant::kPlanVarB;
  const auto entity = world.entities.front().query;
  for (auto _ : state) benchmark::DoNotOptimize(pipeline::run_strategy("PLAN_VAR_B", entity, cfg, ctx));
}
BENCHMARK(BM_PlanVarBTrial);

}  // namespace

BENCHMARK_MAIN();
