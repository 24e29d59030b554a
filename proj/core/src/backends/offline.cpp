#include "planrag/backends/offline.hpp"

#include <algorithm>
#include <set>

#include "planrag/error.hpp"
#include "planrag/textproc.hpp"

namespace planrag::backends {

void ScriptedGenerator::add_response(std::string prompt, std::string response) {
  table_.insert_or_assign(std::move(prompt), std::move(response));
}

void ScriptedGenerator::add_rule(Rule rule) { rules_.push_back(std::move(rule)); }

std::string ScriptedGenerator::do_generate(std::string_view prompt, const SamplingParams& params) {
  if (const auto it = table_.find(prompt); it != table_.end()) return it->second;
  for (const auto& rule : rules_) {
    if (auto out = rule(prompt, params)) return *out;
  }
  return {};
}

std::string phrase_key(std::string_view text) {
  return " " + textproc::join_tokens(textproc::tokenize(text)) + " ";
}

bool contains_phrase(std::string_view haystack, std::string_view needle) {
  const std::string n = phrase_key(needle);
  return n.size() > 2 && phrase_key(haystack).find(n) != std::string::npos;
}

void ExactMatchQA::register_answer(std::string_view question, std::string answer, double confidence) {
  std::string key = phrase_key(answer);
  if (key.size() <= 2) throw Error(ErrorCode::kInvalidArgument, "registered answer has no tokens");
  std::string question_key = phrase_key(question);
  if (question_key.size() <= 2) throw Error(ErrorCode::kInvalidArgument, "registered question has no tokens");
  registry_[std::move(question_key)].push_back(Candidate{std::move(answer), std::move(key), confidence});
}

std::vector<ScoredAnswer> ExactMatchQA::do_answer(std::string_view question, std::span<const Snippet> passages) {
  const auto it = registry_.find(phrase_key(question));
  if (it == registry_.end()) return {};

  std::vector<const Snippet*> by_id;
  for (const auto& p : passages) by_id.push_back(&p);
  std::sort(by_id.begin(), by_id.end(), [](const Snippet* a, const Snippet* b) { return a->id < b->id; });
  std::vector<std::string> keys;
  keys.reserve(by_id.size());
  for (const auto* p : by_id) keys.push_back(phrase_key(p->passage()));

  std::vector<ScoredAnswer> out;
  for (const auto& cand : it->second) {
    for (std::size_t i = 0; i < by_id.size(); ++i) {
      if (keys[i].find(cand.key) != std::string::npos) {
        out.push_back(ScoredAnswer{cand.text, cand.confidence, by_id[i]->id});
        break;
      }
    }
  }
  return out;
}

void FactOracleEntailment::register_fact(std::string fact_id, std::string_view surface_form) {
  std::string key = phrase_key(surface_form);
  if (key.size() <= 2) throw Error(ErrorCode::kInvalidArgument, "fact surface form has no tokens");
  forms_.emplace_back(std::move(fact_id), std::move(key));
}

std::vector<std::string> FactOracleEntailment::facts_in(std::string_view text) const {
  const std::string key = phrase_key(text);
  std::set<std::string> ids;
  for (const auto& [id, form] : forms_) {
    if (key.find(form) != std::string::npos) ids.insert(id);
  }
  return {ids.begin(), ids.end()};
}

double FactOracleEntailment::do_entail(std::string_view premise, std::string_view hypothesis) {
  const auto claimed = facts_in(hypothesis);
  if (claimed.empty()) return 0.0;
  const auto planted = facts_in(premise);
  return std::includes(planted.begin(), planted.end(), claimed.begin(), claimed.end()) ? 1.0 : 0.0;
}

}  // namespace planrag::backends
