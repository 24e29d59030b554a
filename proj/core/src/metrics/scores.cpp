#include "planrag/metrics/scores.hpp"

#include <algorithm>

#include "planrag/error.hpp"
#include "planrag/textproc.hpp"

namespace planrag::metrics {
namespace {

std::size_t lcs_length(const textproc::TokenSequence& a, const textproc::TokenSequence& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

AISScores ais_aggregate(const std::vector<std::vector<bool>>& per_output) {
  if (per_output.empty()) throw Error(ErrorCode::kEmptyInput, "no outputs to aggregate");
  AISScores s;
  double fraction_sum = 0.0;
  std::size_t all_attributed = 0;
  for (const auto& v : per_output) {
    if (v.empty()) throw Error(ErrorCode::kEmptyInput, "output with no sentences");
    const auto hits = static_cast<std::size_t>(std::count(v.begin(), v.end(), true));
    if (hits == v.size()) ++all_attributed;
    fraction_sum += static_cast<double>(hits) / static_cast<double>(v.size());
    s.n_attributed += hits;
    s.n_sentences += v.size();
  }
  s.n_outputs = per_output.size();
  s.strict = static_cast<double>(all_attributed) / static_cast<double>(s.n_outputs);
  s.macro = fraction_sum / static_cast<double>(s.n_outputs);
  s.micro = static_cast<double>(s.n_attributed) / static_cast<double>(s.n_sentences);
  return s;
}

double rouge_n_precision(std::string_view candidate, std::string_view reference, std::size_t n) {
  if (n != 1 && n != 2) throw Error(ErrorCode::kInvalidArgument, "ROUGE-N precision supports n = 1 or 2");
  const auto cand = textproc::ngrams(textproc::tokenize(candidate), n);
  const std::size_t total = textproc::ngram_total(cand);
  if (total == 0) return 0.0;
  const auto ref = textproc::ngrams(textproc::tokenize(reference), n);
  std::size_t overlap = 0;
  for (const auto& [gram, count] : cand) {
    if (const auto it = ref.find(gram); it != ref.end()) overlap += std::min(count, it->second);
  }
  return static_cast<double>(overlap) / static_cast<double>(total);
}

double rouge_lsum_precision(std::string_view candidate, std::string_view reference) {
  const auto ref = textproc::tokenize(reference);
  std::size_t hits = 0;
  std::size_t total = 0;
  for (const auto& sentence : textproc::split_sentences(candidate)) {
    const auto tokens = textproc::tokenize(sentence);
    total += tokens.size();
    hits += lcs_length(tokens, ref);
  }
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

Uniqueness ngram_uniqueness(std::string_view text, std::size_t n) {
  const auto counts = textproc::ngrams(textproc::tokenize(text), n);
  const std::size_t total = textproc::ngram_total(counts);
  if (total == 0) return {1.0, false};
  return {static_cast<double>(counts.size()) / static_cast<double>(total), true};
}

}  // namespace planrag::metrics
