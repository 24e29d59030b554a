#include "planrag/pipeline/types.hpp"

#include "planrag/error.hpp"

namespace planrag::pipeline {

std::string EntityQuery::rendered() const {
  return disambiguator && !disambiguator->empty() ? name + " (" + *disambiguator + ")" : name;
}

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kNoRetrieval: return "NO_RETRIEVAL";
    case Variant::kOneRetrieval: return "ONE_RETRIEVAL";
    case Variant::kPlanVarA: return "PLAN_VAR_A";
    case Variant::kPlanVarB: return "PLAN_VAR_B";
  }
  return "UNKNOWN";
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (auto v : {Variant::kNoRetrieval, Variant::kOneRetrieval, Variant::kPlanVarA, Variant::kPlanVarB}) {
    if (variant_name(v) == name) return v;
  }
  return std::nullopt;
}

void PipelineConfig::validate() const {
  const auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidParams, what);
  };
  require(k_initial >= 1, "k_initial must be >= 1");
  require(k_initial_multiplier >= 1, "k_initial_multiplier must be >= 1");
  require(k_per_query >= 1, "k_per_query must be >= 1");
  require(max_answers_per_question >= 1, "max_answers_per_question must be >= 1");
  require(num_runs >= 1, "num_runs must be >= 1");
  require(qa_confidence_threshold >= 0.0 && qa_confidence_threshold <= 1.0,
          "qa_confidence_threshold must be in [0,1]");
  sampling.validate();
}

std::vector<Snippet> EvidencePool::all_snippets() const {
  std::vector<Snippet> out = initial_snippets;
  out.insert(out.end(), query_snippets.begin(), query_snippets.end());
  return out;
}

std::vector<std::string> EvidencePool::passages() const {
  std::vector<std::string> out;
  for (const auto& s : initial_snippets) out.push_back(s.passage());
  for (const auto& s : query_snippets) out.push_back(s.passage());
  for (const auto& item : qa_items) {
    for (const auto& a : item.answers) out.push_back(a.text);
  }
  return out;
}

void to_json(nlohmann::json& j, const EntityQuery& e) {
  j = nlohmann::json{{"name", e.name},
                     {"kind", e.kind == EntityKind::kEntityBio ? "ENTITY_BIO" : "EVENT_SUMMARY"}};
  j["disambiguator"] = e.disambiguator ? nlohmann::json(*e.disambiguator) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, EntityQuery& e) {
  e.name = j.at("name").get<std::string>();
  e.disambiguator.reset();
  if (j.contains("disambiguator") && j["disambiguator"].is_string()) e.disambiguator = j["disambiguator"].get<std::string>();
  e.kind = j.value("kind", "ENTITY_BIO") == "EVENT_SUMMARY" ? EntityKind::kEventSummary : EntityKind::kEntityBio;
}

void to_json(nlohmann::json& j, const PipelineConfig& c) {
  j = nlohmann::json{{"k_initial", c.k_initial},
                     {"k_initial_multiplier", c.k_initial_multiplier},
                     {"k_per_query", c.k_per_query},
                     {"qa_confidence_threshold", c.qa_confidence_threshold},
                     {"max_answers_per_question", c.max_answers_per_question},
                     {"enable_second_search", c.enable_second_search},
                     {"mark_unanswerable", c.mark_unanswerable},
                     {"use_outline", c.use_outline},
                     {"variant", variant_name(c.variant)},
                     {"sampling", c.sampling},
                     {"num_runs", c.num_runs}};
}

void from_json(const nlohmann::json& j, PipelineConfig& c) {
  c.k_initial = j.value("k_initial", c.k_initial);
  c.k_initial_multiplier = j.value("k_initial_multiplier", c.k_initial_multiplier);
  c.k_per_query = j.value("k_per_query", c.k_per_query);
  c.qa_confidence_threshold = j.value("qa_confidence_threshold", c.qa_confidence_threshold);
  c.max_answers_per_question = j.value("max_answers_per_question", c.max_answers_per_question);
  c.enable_second_search = j.value("enable_second_search", c.enable_second_search);
  c.mark_unanswerable = j.value("mark_unanswerable", c.mark_unanswerable);
  c.use_outline = j.value("use_outline", c.use_outline);
  if (j.contains("variant")) {
    const auto name = j["variant"].get<std::string>();
    const auto v = parse_variant(name);
    if (!v) throw Error(ErrorCode::kConfigInvalid, "unknown variant '" + name + "'");
    c.variant = *v;
  }
  if (j.contains("sampling")) {
    SamplingParams merged = c.sampling;
    backends::from_json(j["sampling"], merged);
    c.sampling = merged;
  }
  c.num_runs = j.value("num_runs", c.num_runs);
}

void to_json(nlohmann::json& j, const Question& q) {
  j = nlohmann::json{{"paragraph_index", q.paragraph_index}, {"text", q.text}};
}

void from_json(const nlohmann::json& j, Question& q) {
  q.paragraph_index = j.at("paragraph_index").get<int>();
  q.text = j.at("text").get<std::string>();
}

void to_json(nlohmann::json& j, const QAItem& q) {
  j = nlohmann::json{{"question", q.question}, {"answers", q.answers}, {"unanswerable", q.unanswerable}};
}

void from_json(const nlohmann::json& j, QAItem& q) {
  q.question = j.at("question").get<Question>();
  q.answers = j.at("answers").get<std::vector<ScoredAnswer>>();
  q.unanswerable = j.at("unanswerable").get<bool>();
}

void to_json(nlohmann::json& j, const EvidencePool& p) {
  j = nlohmann::json{{"initial_snippets", p.initial_snippets},
                     {"query_snippets", p.query_snippets},
                     {"qa_items", p.qa_items}};
}

void from_json(const nlohmann::json& j, EvidencePool& p) {
  p.initial_snippets = j.at("initial_snippets").get<std::vector<Snippet>>();
  p.query_snippets = j.at("query_snippets").get<std::vector<Snippet>>();
  p.qa_items = j.at("qa_items").get<std::vector<QAItem>>();
}

void to_json(nlohmann::json& j, const RunRecord& r) {
  nlohmann::json prompts = nlohmann::json::array();
  for (const auto& p : r.prompts_issued) prompts.push_back({{"stage", p.stage}, {"text", p.text}});
  nlohmann::json attribution = nlohmann::json::array();
  for (bool b : r.attribution) attribution.push_back(b);
  j = nlohmann::json{{"strategy", r.strategy},
                     {"entity", r.entity},
                     {"variant", variant_name(r.variant)},
                     {"k_initial", r.k_initial},
                     {"k_initial_multiplier", r.k_initial_multiplier},
                     {"enable_second_search", r.enable_second_search},
                     {"mark_unanswerable", r.mark_unanswerable},
                     {"use_outline", r.use_outline},
                     {"seed", r.seed},
                     {"prompts_issued", prompts},
                     {"questions", r.questions},
                     {"evidence", r.evidence},
                     {"output", r.output},
                     {"sentences", r.sentences},
                     {"attribution", attribution}};
}

void from_json(const nlohmann::json& j, RunRecord& r) {
  r.strategy = j.value("strategy", "");
  r.entity = j.at("entity").get<EntityQuery>();
  const auto v = parse_variant(j.at("variant").get<std::string>());
  if (!v) throw Error(ErrorCode::kParseError, "record has an unknown variant");
  r.variant = *v;
  r.k_initial = j.value("k_initial", 5);
  r.k_initial_multiplier = j.value("k_initial_multiplier", 1);
  r.enable_second_search = j.value("enable_second_search", true);
  r.mark_unanswerable = j.value("mark_unanswerable", true);
  r.use_outline = j.value("use_outline", true);
  r.seed = j.at("seed").get<std::uint64_t>();
  r.prompts_issued.clear();
  for (const auto& p : j.at("prompts_issued")) {
    r.prompts_issued.push_back({p.at("stage").get<std::string>(), p.at("text").get<std::string>()});
  }
  r.questions = j.value("questions", std::vector<Question>{});
  r.evidence = j.at("evidence").get<EvidencePool>();
  r.output = j.at("output").get<std::string>();
  r.sentences = j.at("sentences").get<std::vector<std::string>>();
  r.attribution.clear();
  for (const auto& b : j.at("attribution")) r.attribution.push_back(b.get<bool>());
}

}  // namespace planrag::pipeline
