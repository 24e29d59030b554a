#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "planrag/backends/interfaces.hpp"

namespace planrag::backends {

/// Deterministic generator driven by an exact prompt table and, failing
/// that, an ordered list of rules. Rules must be pure functions of their
/// arguments. An unmatched prompt yields no text (EMPTY_RESPONSE).
/// Configure before sharing across threads.
class ScriptedGenerator : public Generator {
 public:
  using Rule = std::function<std::optional<std::string>(std::string_view prompt, const SamplingParams& params)>;

  using Generator::Generator;

  void add_response(std::string prompt, std::string response);
  void add_rule(Rule rule);

 protected:
  std::string do_generate(std::string_view prompt, const SamplingParams& params) override;

 private:
  std::map<std::string, std::string, std::less<>> table_;
  std::vector<Rule> rules_;
};

/// Lowercased, punctuation-stripped token text padded with one space on
/// each side, so phrase containment respects word boundaries.
std::string phrase_key(std::string_view text);

/// True when `needle` occurs in `haystack` as a whole-word phrase after
/// phrase_key normalisation of both.
bool contains_phrase(std::string_view haystack, std::string_view needle);

/// Extractive QA stand-in. Each registered question maps to candidate answer
/// strings with fixed confidences; a candidate is returned when it occurs in
/// some passage, citing the matching passage with the smallest id.
class ExactMatchQA : public QuestionAnswerer {
 public:
  void register_answer(std::string_view question, std::string answer, double confidence);

 protected:
  std::vector<ScoredAnswer> do_answer(std::string_view question, std::span<const Snippet> passages) override;

 private:
  struct Candidate {
    std::string text;
    std::string key;
    double confidence;
  };
  std::map<std::string, std::vector<Candidate>, std::less<>> registry_;
};

/// Entailment stand-in over planted facts. A text "carries" a fact when one
/// of the fact's registered surface forms occurs in it as a phrase. The
/// score is 1.0 iff the hypothesis carries at least one fact and every fact
/// it carries is also carried by the premise; otherwise 0.0.
class FactOracleEntailment : public EntailmentScorer {
 public:
  void register_fact(std::string fact_id, std::string_view surface_form);

  std::vector<std::string> facts_in(std::string_view text) const;

 protected:
  double do_entail(std::string_view premise, std::string_view hypothesis) override;

 private:
  std::vector<std::pair<std::string, std::string>> forms_;  // (fact id, phrase key)
};

}  // namespace planrag::backends
