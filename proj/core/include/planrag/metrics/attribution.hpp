#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "planrag/backends/interfaces.hpp"

namespace planrag::metrics {

struct AttributionOptions {
  double nli_threshold = 0.5;
  std::size_t window_tokens = 400;
  std::size_t window_overlap = 50;
};

/// Splits a passage into whitespace-word windows of `window` words that
/// overlap by `overlap` words. Passages that fit in one window come back
/// unchanged.
std::vector<std::string> passage_windows(std::string_view passage, std::size_t window, std::size_t overlap);

/// True iff some window of some passage entails `sentence` with a score of
/// at least the threshold. Empty evidence yields false.
bool attribute_sentence(std::string_view sentence, std::span<const std::string> evidence,
                        backends::EntailmentScorer& scorer, const AttributionOptions& options = {});

std::vector<bool> attribute_sentences(std::span<const std::string> sentences, std::span<const std::string> evidence,
                                      backends::EntailmentScorer& scorer, const AttributionOptions& options = {});

/// In-process memo in front of a scorer, so each (premise, hypothesis) pair
/// reaches the wrapped scorer once.
class MemoizedEntailment : public backends::EntailmentScorer {
 public:
  explicit MemoizedEntailment(std::shared_ptr<backends::EntailmentScorer> inner);

 protected:
  double do_entail(std::string_view premise, std::string_view hypothesis) override;

 private:
  std::shared_ptr<backends::EntailmentScorer> inner_;
  std::mutex mu_;
  std::map<std::pair<std::string, std::string>, double> memo_;
};

}  // namespace planrag::metrics
