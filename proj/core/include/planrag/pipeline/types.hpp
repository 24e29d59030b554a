#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "planrag/backends/types.hpp"

namespace planrag::pipeline {

using backends::SamplingParams;
using backends::ScoredAnswer;
using backends::Snippet;

enum class EntityKind { kEntityBio, kEventSummary };

struct EntityQuery {
  std::string name;
  std::optional<std::string> disambiguator;
  EntityKind kind = EntityKind::kEntityBio;

  /// "name" or "name (disambiguator)".
  std::string rendered() const;

  bool operator==(const EntityQuery&) const = default;
};

enum class Variant { kNoRetrieval, kOneRetrieval, kPlanVarA, kPlanVarB };

std::string_view variant_name(Variant v);
/// Accepts the names produced by variant_name (e.g. "PLAN_VAR_B").
std::optional<Variant> parse_variant(std::string_view name);

struct PipelineConfig {
  int k_initial = 5;
  int k_initial_multiplier = 1;
  int k_per_query = 3;
  double qa_confidence_threshold = 0.5;
  int max_answers_per_question = 3;
  bool enable_second_search = true;
  bool mark_unanswerable = true;
  bool use_outline = true;
  Variant variant = Variant::kPlanVarB;
  SamplingParams sampling;
  int num_runs = 3;

  /// Throws INVALID_PARAMS when a count is < 1 or the threshold is outside [0,1].
  void validate() const;
};

struct OutlineParagraph {
  int index = 1;
  std::string instructions;

  bool operator==(const OutlineParagraph&) const = default;
};

struct Outline {
  std::vector<OutlineParagraph> paragraphs;

  bool operator==(const Outline&) const = default;
};

struct Question {
  int paragraph_index = 1;
  std::string text;

  bool operator==(const Question&) const = default;
};

struct QAItem {
  Question question;
  std::vector<ScoredAnswer> answers;
  bool unanswerable = false;

  bool operator==(const QAItem&) const = default;
};

struct EvidencePool {
  std::vector<Snippet> initial_snippets;
  std::vector<Snippet> query_snippets;
  std::vector<QAItem> qa_items;

  /// Initial snippets, then query snippets, each in retrieval order.
  std::vector<Snippet> all_snippets() const;

  /// Evidence passages used for attribution and as the ROUGE reference:
  /// every snippet passage, then every retained answer text, in pool order.
  std::vector<std::string> passages() const;

  bool operator==(const EvidencePool&) const = default;
};

struct PromptRecord {
  std::string stage;
  std::string text;

  bool operator==(const PromptRecord&) const = default;
};

/// One trial, end to end.
struct RunRecord {
  std::string strategy;  // row label in reports
  EntityQuery entity;
  Variant variant = Variant::kNoRetrieval;
  int k_initial = 5;
  int k_initial_multiplier = 1;
  bool enable_second_search = true;
  bool mark_unanswerable = true;
  bool use_outline = true;
  std::uint64_t seed = 0;
  std::vector<PromptRecord> prompts_issued;
  std::vector<Question> questions;
  EvidencePool evidence;
  std::string output;
  std::vector<std::string> sentences;
  std::vector<bool> attribution;

  bool operator==(const RunRecord&) const = default;
};

void to_json(nlohmann::json& j, const EntityQuery& e);
void from_json(const nlohmann::json& j, EntityQuery& e);
void to_json(nlohmann::json& j, const PipelineConfig& c);
void from_json(const nlohmann::json& j, PipelineConfig& c);
void to_json(nlohmann::json& j, const Question& q);
void from_json(const nlohmann::json& j, Question& q);
void to_json(nlohmann::json& j, const QAItem& q);
void from_json(const nlohmann::json& j, QAItem& q);
void to_json(nlohmann::json& j, const EvidencePool& p);
void from_json(const nlohmann::json& j, EvidencePool& p);
void to_json(nlohmann::json& j, const RunRecord& r);
void from_json(const nlohmann::json& j, RunRecord& r);

}  // namespace planrag::pipeline
