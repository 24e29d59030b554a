#include "planrag/pipeline/strategies.hpp"

#include <set>

#include <spdlog/spdlog.h>

#include "planrag/error.hpp"
#include "planrag/pipeline/parse.hpp"
#include "planrag/textproc.hpp"

namespace planrag::pipeline {
namespace {

void require_variant(const PipelineConfig& cfg, Variant expected) {
  if (cfg.variant != expected) {
    throw Error(ErrorCode::kInvalidArgument, "config variant is " + std::string(variant_name(cfg.variant)) +
                                                 ", expected " + std::string(variant_name(expected)));
  }
}

RunRecord start_record(const EntityQuery& entity, const PipelineConfig& cfg) {
  cfg.validate();
  RunRecord r;
  r.entity = entity;
  r.variant = cfg.variant;
  r.k_initial = cfg.k_initial;
  r.k_initial_multiplier = cfg.k_initial_multiplier;
  r.enable_second_search = cfg.enable_second_search;
  r.mark_unanswerable = cfg.mark_unanswerable;
  r.use_outline = cfg.use_outline;
  r.seed = cfg.sampling.seed;
  return r;
}

std::string generate_logged(const std::string& stage, const std::string& prompt, const PipelineConfig& cfg,
                            const PipelineContext& ctx, std::vector<PromptRecord>& log) {
  log.push_back({stage, prompt});
  return ctx.backends.generator->generate(prompt, cfg.sampling);
}

std::vector<Snippet> initial_search(const EntityQuery& entity, const PipelineConfig& cfg,
                                    const PipelineContext& ctx) {
  return ctx.backends.search->search(entity.rendered(), cfg.k_initial * cfg.k_initial_multiplier);
}

void finish_record(RunRecord& r, const PipelineContext& ctx) {
  r.sentences = textproc::split_sentences(r.output);
  const auto evidence = r.evidence.passages();
  r.attribution = metrics::attribute_sentences(r.sentences, evidence, *ctx.backends.entail, ctx.attribution);
}

std::string dedup_key(const Snippet& s) { return s.source_url.empty() ? "id:" + s.id : s.source_url; }

}  // namespace

Plan build_plan(const EntityQuery& entity, const std::vector<Snippet>& initial, const PipelineConfig& cfg,
                const PipelineContext& ctx) {
  if (initial.empty()) throw Error(ErrorCode::kEmptyEvidence, "no initial search results for " + entity.rendered());
  Plan plan;
  const std::string name = entity.rendered();

  if (!cfg.use_outline) {
    const auto prompt = ctx.prompts.render(
        TemplateId::kQuestions, PromptBindings{.entity = name, .snippets = initial, .paragraph = std::string(kBioGoal)});
    plan.outline.paragraphs.push_back({1, std::string(kBioGoal)});
    plan.questions = parse_questions(generate_logged("questions", prompt, cfg, ctx, plan.prompts), 1);
    return plan;
  }

  const auto outline_prompt =
      ctx.prompts.render(TemplateId::kOutline, PromptBindings{.entity = name, .snippets = initial});
  const std::string raw = generate_logged("outline", outline_prompt, cfg, ctx, plan.prompts);
  try {
    plan.outline = parse_outline(raw);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoParagraphs) throw;
    spdlog::warn("outline for '{}' has no paragraph headers; using the whole text as one paragraph", name);
    std::string text = textproc::trim(raw);
    plan.outline.paragraphs.push_back({1, text.empty() ? std::string(kBioGoal) : std::move(text)});
  }

  for (const auto& paragraph : plan.outline.paragraphs) {
    const auto prompt = ctx.prompts.render(
        TemplateId::kQuestions, PromptBindings{.entity = name, .snippets = initial, .paragraph = paragraph.instructions});
    auto questions = parse_questions(generate_logged("questions", prompt, cfg, ctx, plan.prompts), paragraph.index);
    plan.questions.insert(plan.questions.end(), questions.begin(), questions.end());
  }
  return plan;
}

EvidencePool gather_evidence(const EntityQuery& entity, const std::vector<Question>& questions,
                             const std::vector<Snippet>& initial, const PipelineConfig& cfg,
                             const PipelineContext& ctx) {
  EvidencePool pool;
  pool.initial_snippets = initial;
  if (!cfg.enable_second_search) return pool;

  std::set<std::string> seen_urls;
  std::set<std::string> seen_ids;
  for (const auto& s : initial) {
    seen_urls.insert(dedup_key(s));
    seen_ids.insert(s.id);
  }

  std::set<std::string> searched;
  std::size_t attempted = 0;
  std::size_t failed = 0;
  for (const auto& q : questions) {
    if (!searched.insert(normalize_query(q.text)).second) continue;
    ++attempted;
    std::vector<Snippet> results;
    try {
      results = ctx.backends.search->search(q.text, cfg.k_per_query);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kBackendUnavailable) throw;
      ++failed;
      spdlog::warn("search for '{}' failed, skipping: {}", q.text, e.what());
      continue;
    }
    for (auto& s : results) {
      if (!seen_urls.insert(dedup_key(s)).second) continue;
      if (seen_ids.count(s.id)) {
        std::string id;
        for (int n = 2; seen_ids.count(id = s.id + "~" + std::to_string(n)); ++n) {
        }
        s.id = id;
      }
      seen_ids.insert(s.id);
      pool.query_snippets.push_back(std::move(s));
    }
  }
  if (attempted > 0 && failed == attempted) {
    throw Error(ErrorCode::kEmptyEvidence, "every second-round search failed for " + entity.rendered());
  }
  return pool;
}

std::vector<QAItem> answer_questions(const std::vector<Question>& questions, const EvidencePool& pool,
                                     const PipelineConfig& cfg, const PipelineContext& ctx) {
  const auto passages = pool.all_snippets();
  std::vector<QAItem> items;
  for (const auto& q : questions) {
    QAItem item{q, {}, false};
    for (auto& a : ctx.backends.qa->answer(q.text, passages)) {
      if (item.answers.size() == static_cast<std::size_t>(cfg.max_answers_per_question)) break;
      if (a.confidence >= cfg.qa_confidence_threshold) item.answers.push_back(std::move(a));
    }
    item.unanswerable = item.answers.empty();
    if (item.unanswerable && !cfg.mark_unanswerable) continue;
    items.push_back(std::move(item));
  }
  return items;
}

RunRecord run_no_retrieval(const EntityQuery& entity, const PipelineConfig& cfg, const PipelineContext& ctx) {
  require_variant(cfg, Variant::kNoRetrieval);
  RunRecord r = start_record(entity, cfg);
  const auto prompt = ctx.prompts.render(TemplateId::kDirect, PromptBindings{.entity = entity.rendered()});
  r.output = generate_logged("direct", prompt, cfg, ctx, r.prompts_issued);
  // Scoring-only evidence; never shown to the generator.
  r.evidence.initial_snippets = ctx.backends.search->search(entity.rendered(), cfg.k_initial);
  finish_record(r, ctx);
  return r;
}

RunRecord run_one_retrieval(const EntityQuery& entity, const PipelineConfig& cfg, const PipelineContext& ctx) {
  require_variant(cfg, Variant::kOneRetrieval);
  RunRecord r = start_record(entity, cfg);
  r.evidence.initial_snippets = initial_search(entity, cfg, ctx);
  if (r.evidence.initial_snippets.empty()) {
    throw Error(ErrorCode::kEmptyEvidence, "no search results for " + entity.rendered());
  }
  const auto prompt = ctx.prompts.render(
      TemplateId::kSearchGen, PromptBindings{.entity = entity.rendered(), .snippets = r.evidence.initial_snippets});
  r.output = generate_logged("final", prompt, cfg, ctx, r.prompts_issued);
  finish_record(r, ctx);
  return r;
}

RunRecord run_plan_var_a(const EntityQuery& entity, const PipelineConfig& cfg, const PipelineContext& ctx) {
  require_variant(cfg, Variant::kPlanVarA);
  RunRecord r = start_record(entity, cfg);
  const auto initial = initial_search(entity, cfg, ctx);
  auto plan = build_plan(entity, initial, cfg, ctx);
  r.prompts_issued = std::move(plan.prompts);
  r.questions = std::move(plan.questions);
  r.evidence = gather_evidence(entity, r.questions, initial, cfg, ctx);
  const auto prompt = ctx.prompts.render(
      TemplateId::kSearchGen, PromptBindings{.entity = entity.rendered(), .snippets = r.evidence.all_snippets()});
  r.output = generate_logged("final", prompt, cfg, ctx, r.prompts_issued);
  finish_record(r, ctx);
  return r;
}

RunRecord run_plan_var_b(const EntityQuery& entity, const PipelineConfig& cfg, const PipelineContext& ctx) {
  require_variant(cfg, Variant::kPlanVarB);
  RunRecord r = start_record(entity, cfg);
  const auto initial = initial_search(entity, cfg, ctx);
  auto plan = build_plan(entity, initial, cfg, ctx);
  r.prompts_issued = std::move(plan.prompts);
  r.questions = std::move(plan.questions);
  r.evidence = gather_evidence(entity, r.questions, initial, cfg, ctx);
  r.evidence.qa_items = answer_questions(r.questions, r.evidence, cfg, ctx);
  if (r.evidence.qa_items.empty()) {
    throw Error(ErrorCode::kEmptyEvidence, "no question-answer pairs left for " + entity.rendered());
  }
  const auto prompt = ctx.prompts.render(
      TemplateId::kQaGen, PromptBindings{.entity = entity.rendered(), .qa_pairs = r.evidence.qa_items});
  r.output = generate_logged("final", prompt, cfg, ctx, r.prompts_issued);
  finish_record(r, ctx);
  return r;
}

RunRecord run_strategy(const std::string& strategy, const EntityQuery& entity, const PipelineConfig& cfg,
                       const PipelineContext& ctx) {
  RunRecord r;
  switch (cfg.variant) {
    case Variant::kNoRetrieval: r = run_no_retrieval(entity, cfg, ctx); break;
    case Variant::kOneRetrieval: r = run_one_retrieval(entity, cfg, ctx); break;
    case Variant::kPlanVarA: r = run_plan_var_a(entity, cfg, ctx); break;
    case Variant::kPlanVarB: r = run_plan_var_b(entity, cfg, ctx); break;
  }
  r.strategy = strategy;
  return r;
}

}  // namespace planrag::pipeline
