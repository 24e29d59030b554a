#include "planrag/backends/interfaces.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "planrag/error.hpp"

namespace planrag::backends {

void SamplingParams::validate() const {
  if (!(temperature >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "temperature must be >= 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "top_p must be in (0,1]");
  if (max_output_tokens < 1) throw Error(ErrorCode::kInvalidArgument, "max_output_tokens must be >= 1");
}

std::string Snippet::passage() const { return title.empty() ? body : title + "\n" + body; }

std::string_view backend_kind_name(BackendKind kind) {
  switch (kind) {
    case BackendKind::kGenerate: return "GENERATE";
    case BackendKind::kSearch: return "SEARCH";
    case BackendKind::kQa: return "QA";
    case BackendKind::kEntail: return "ENTAIL";
  }
  return "UNKNOWN";
}

void to_json(nlohmann::json& j, const SamplingParams& p) {
  j = nlohmann::json{{"temperature", p.temperature},
                     {"top_p", p.top_p},
                     {"seed", p.seed},
                     {"max_output_tokens", p.max_output_tokens}};
}

void from_json(const nlohmann::json& j, SamplingParams& p) {
  p.temperature = j.value("temperature", p.temperature);
  p.top_p = j.value("top_p", p.top_p);
  p.seed = j.value("seed", p.seed);
  p.max_output_tokens = j.value("max_output_tokens", p.max_output_tokens);
}

void to_json(nlohmann::json& j, const Snippet& s) {
  j = nlohmann::json{{"id", s.id},       {"title", s.title}, {"body", s.body}, {"source_url", s.source_url},
                     {"rank", s.rank},   {"origin_query", s.origin_query}};
}

void from_json(const nlohmann::json& j, Snippet& s) {
  s.id = j.at("id").get<std::string>();
  s.title = j.value("title", "");
  s.body = j.at("body").get<std::string>();
  s.source_url = j.value("source_url", "");
  s.rank = j.value("rank", 1);
  s.origin_query = j.value("origin_query", "");
}

void to_json(nlohmann::json& j, const ScoredAnswer& a) {
  j = nlohmann::json{{"text", a.text}, {"confidence", a.confidence}, {"source_snippet_id", a.source_snippet_id}};
}

void from_json(const nlohmann::json& j, ScoredAnswer& a) {
  a.text = j.at("text").get<std::string>();
  a.confidence = j.at("confidence").get<double>();
  a.source_snippet_id = j.at("source_snippet_id").get<std::string>();
}

std::size_t utf8_length(std::string_view text) {
  return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

std::string Generator::generate(std::string_view prompt, const SamplingParams& params) {
  if (prompt.empty()) throw Error(ErrorCode::kInvalidArgument, "prompt must be non-empty");
  params.validate();
  if (utf8_length(prompt) > max_prompt_chars_) {
    throw Error(ErrorCode::kPromptTooLong, "prompt has " + std::to_string(utf8_length(prompt)) +
                                               " characters, limit is " + std::to_string(max_prompt_chars_));
  }
  ++calls_;
  std::string text = do_generate(prompt, params);
  if (text.empty()) throw Error(ErrorCode::kEmptyResponse, "backend returned no text");
  return text;
}

std::vector<Snippet> SearchEngine::search(std::string_view query, int k) {
  if (query.empty()) throw Error(ErrorCode::kInvalidArgument, "search query must be non-empty");
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  ++calls_;
  std::vector<Snippet> raw = do_search(query, k);
  std::vector<Snippet> out;
  std::set<std::string> seen;
  for (auto& s : raw) {
    if (out.size() == static_cast<std::size_t>(k)) break;
    if (s.body.empty() || !seen.insert(s.id).second) continue;
    s.rank = static_cast<int>(out.size()) + 1;
    s.origin_query = std::string(query);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ScoredAnswer> QuestionAnswerer::answer(std::string_view question, std::span<const Snippet> passages) {
  if (question.empty()) throw Error(ErrorCode::kInvalidArgument, "question must be non-empty");
  if (passages.empty()) return {};
  ++calls_;
  std::set<std::string> ids;
  for (const auto& p : passages) ids.insert(p.id);
  std::vector<ScoredAnswer> out;
  for (auto& a : do_answer(question, passages)) {
    if (!ids.count(a.source_snippet_id)) continue;
    a.confidence = std::isnan(a.confidence) ? 0.0 : std::clamp(a.confidence, 0.0, 1.0);
    out.push_back(std::move(a));
  }
  std::stable_sort(out.begin(), out.end(), [](const ScoredAnswer& a, const ScoredAnswer& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return a.source_snippet_id < b.source_snippet_id;
  });
  return out;
}

double EntailmentScorer::entail(std::string_view premise, std::string_view hypothesis) {
  if (premise.empty() || hypothesis.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "premise and hypothesis must be non-empty");
  }
  ++calls_;
  const double score = do_entail(premise, hypothesis);
  return std::isnan(score) ? 0.0 : std::clamp(score, 0.0, 1.0);
}

}  // namespace planrag::backends
