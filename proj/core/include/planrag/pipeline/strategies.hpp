#pragma once

#include <string>
#include <vector>

#include "planrag/backends/interfaces.hpp"
#include "planrag/metrics/attribution.hpp"
#include "planrag/pipeline/prompts.hpp"
#include "planrag/pipeline/types.hpp"

namespace planrag::pipeline {

/// Paragraph binding for question generation when no outline is written.
inline constexpr std::string_view kBioGoal = "(a bio covering the most important facts)";

struct PipelineContext {
  backends::BackendSet backends;
  PromptLibrary prompts;
  metrics::AttributionOptions attribution;
};

struct Plan {
  Outline outline;
  std::vector<Question> questions;
  std::vector<PromptRecord> prompts;  // stage "outline" then one "questions" per call
};

/// Outline, then one question prompt per paragraph; without an outline a
/// single question prompt bound to kBioGoal. Headerless outlines fall back
/// to a single paragraph. Throws EMPTY_EVIDENCE when `initial` is empty.
Plan build_plan(const EntityQuery& entity, const std::vector<Snippet>& initial, const PipelineConfig& cfg,
                const PipelineContext& ctx);

/// Second search round: each distinct question (see normalize_query) is
/// searched once and new snippets are appended, deduplicated by URL with
/// the first occurrence kept. Failed searches are logged and skipped; if
/// every search fails the result is EMPTY_EVIDENCE.
EvidencePool gather_evidence(const EntityQuery& entity, const std::vector<Question>& questions,
                             const std::vector<Snippet>& initial, const PipelineConfig& cfg,
                             const PipelineContext& ctx);

/// QA over every pool snippet, keeping at most max_answers_per_question
/// answers at or above the confidence threshold. Questions left without
/// answers are marked unanswerable, or dropped when mark_unanswerable is off.
std::vector<QAItem> answer_questions(const std::vector<Question>& questions, const EvidencePool& pool,
                                     const PipelineConfig& cfg, const PipelineContext& ctx);

RunRecord run_no_retrieval(const EntityQuery& entity, const PipelineConfig& cfg, const PipelineContext& ctx);
RunRecord run_one_retrieval(const EntityQuery& entity, const PipelineConfig& cfg, const PipelineContext& ctx);
RunRecord run_plan_var_a(const EntityQuery& entity, const PipelineConfig& cfg, const PipelineContext& ctx);
RunRecord run_plan_var_b(const EntityQuery& entity, const PipelineConfig& cfg, const PipelineContext& ctx);

/// Dispatches on cfg.variant and stamps `strategy` on the record.
RunRecord run_strategy(const std::string& strategy, const EntityQuery& entity, const PipelineConfig& cfg,
                       const PipelineContext& ctx);

}  // namespace planrag::pipeline
