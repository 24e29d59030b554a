#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "planrag/backends/types.hpp"

namespace planrag::backends {

// The four service interfaces follow the non-virtual-interface pattern: the
// public method checks preconditions, counts the call, delegates to the
// protected hook and then enforces the postconditions, so every
// implementation (offline, HTTP, cached) gets identical contracts.
//
// All implementations must tolerate concurrent calls.

inline constexpr std::size_t kDefaultMaxPromptChars = 30000;

class Generator {
 public:
  explicit Generator(std::size_t max_prompt_chars = kDefaultMaxPromptChars)
      : max_prompt_chars_(max_prompt_chars) {}
  virtual ~Generator() = default;
  Generator(const Generator&) = delete;
  Generator& operator=(const Generator&) = delete;

  /// Throws INVALID_ARGUMENT (empty prompt or bad params), PROMPT_TOO_LONG,
  /// EMPTY_RESPONSE, or whatever the implementation raises.
  std::string generate(std::string_view prompt, const SamplingParams& params);

  std::size_t max_prompt_chars() const { return max_prompt_chars_; }
  /// Number of calls that reached the implementation hook.
  std::size_t calls() const { return calls_.load(); }

 protected:
  virtual std::string do_generate(std::string_view prompt, const SamplingParams& params) = 0;

 private:
  std::size_t max_prompt_chars_;
  std::atomic<std::size_t> calls_{0};
};

class SearchEngine {
 public:
  SearchEngine() = default;
  virtual ~SearchEngine() = default;
  SearchEngine(const SearchEngine&) = delete;
  SearchEngine& operator=(const SearchEngine&) = delete;

  /// At most k snippets with contiguous ranks 1..n, distinct ids, non-empty
  /// bodies and origin_query == query. An empty result is not an error.
  std::vector<Snippet> search(std::string_view query, int k);

  std::size_t calls() const { return calls_.load(); }

 protected:
  virtual std::vector<Snippet> do_search(std::string_view query, int k) = 0;

 private:
  std::atomic<std::size_t> calls_{0};
};

class QuestionAnswerer {
 public:
  QuestionAnswerer() = default;
  virtual ~QuestionAnswerer() = default;
  QuestionAnswerer(const QuestionAnswerer&) = delete;
  QuestionAnswerer& operator=(const QuestionAnswerer&) = delete;

  /// Answers sorted by confidence descending, ties by source_snippet_id
  /// ascending. Every source id refers to one of `passages`; answers citing
  /// anything else are discarded. Empty passages short-circuit to [].
  std::vector<ScoredAnswer> answer(std::string_view question, std::span<const Snippet> passages);

  std::size_t calls() const { return calls_.load(); }

 protected:
  virtual std::vector<ScoredAnswer> do_answer(std::string_view question,
                                              std::span<const Snippet> passages) = 0;

 private:
  std::atomic<std::size_t> calls_{0};
};

class EntailmentScorer {
 public:
  EntailmentScorer() = default;
  virtual ~EntailmentScorer() = default;
  EntailmentScorer(const EntailmentScorer&) = delete;
  EntailmentScorer& operator=(const EntailmentScorer&) = delete;

  /// Support score in [0,1]; higher means the premise supports the hypothesis.
  double entail(std::string_view premise, std::string_view hypothesis);

  std::size_t calls() const { return calls_.load(); }

 protected:
  virtual double do_entail(std::string_view premise, std::string_view hypothesis) = 0;

 private:
  std::atomic<std::size_t> calls_{0};
};

struct BackendSet {
  std::shared_ptr<Generator> generator;
  std::shared_ptr<SearchEngine> search;
  std::shared_ptr<QuestionAnswerer> qa;
  std::shared_ptr<EntailmentScorer> entail;
};

/// Length in Unicode code points of UTF-8 text.
std::size_t utf8_length(std::string_view text);

}  // namespace planrag::backends
