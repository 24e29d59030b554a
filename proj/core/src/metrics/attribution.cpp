#include "planrag/metrics/attribution.hpp"

#include <algorithm>

#include "planrag/error.hpp"
#include "planrag/textproc.hpp"

namespace planrag::metrics {
namespace {

std::vector<std::string_view> words_of(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (const auto ws = textproc::whitespace_length(text, pos); ws > 0) {
      pos += ws;
      continue;
    }
    const std::size_t start = pos;
    while (pos < text.size() && textproc::whitespace_length(text, pos) == 0) ++pos;
    words.push_back(text.substr(start, pos - start));
  }
  return words;
}

}  // namespace

std::vector<std::string> passage_windows(std::string_view passage, std::size_t window, std::size_t overlap) {
  if (window == 0 || overlap >= window) {
    throw Error(ErrorCode::kInvalidArgument, "window must be positive and larger than the overlap");
  }
  const auto words = words_of(passage);
  if (words.size() <= window) return {std::string(passage)};

  std::vector<std::string> out;
  const std::size_t stride = window - overlap;
  for (std::size_t start = 0;; start += stride) {
    const std::size_t end = std::min(words.size(), start + window);
    std::string w;
    for (std::size_t i = start; i < end; ++i) {
      if (!w.empty()) w.push_back(' ');
      w += words[i];
    }
    out.push_back(std::move(w));
    if (end == words.size()) break;
  }
  return out;
}

bool attribute_sentence(std::string_view sentence, std::span<const std::string> evidence,
                        backends::EntailmentScorer& scorer, const AttributionOptions& options) {
  if (textproc::trim(sentence).empty()) return false;
  for (const auto& passage : evidence) {
    if (textproc::trim(passage).empty()) continue;
    for (const auto& window : passage_windows(passage, options.window_tokens, options.window_overlap)) {
      if (scorer.entail(window, sentence) >= options.nli_threshold) return true;
    }
  }
  return false;
}

std::vector<bool> attribute_sentences(std::span<const std::string> sentences, std::span<const std::string> evidence,
                                      backends::EntailmentScorer& scorer, const AttributionOptions& options) {
  std::vector<bool> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(attribute_sentence(s, evidence, scorer, options));
  return out;
}

MemoizedEntailment::MemoizedEntailment(std::shared_ptr<backends::EntailmentScorer> inner) : inner_(std::move(inner)) {}

double MemoizedEntailment::do_entail(std::string_view premise, std::string_view hypothesis) {
  auto key = std::make_pair(std::string(premise), std::string(hypothesis));
  {
    std::lock_guard lock(mu_);
    if (const auto it = memo_.find(key); it != memo_.end()) return it->second;
  }
  const double score = inner_->entail(premise, hypothesis);
  std::lock_guard lock(mu_);
  memo_.emplace(std::move(key), score);
  return score;
}

}  // namespace planrag::metrics
