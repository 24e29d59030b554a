#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace planrag::metrics {

struct AISScores {
  double strict = 0.0;
  double macro = 0.0;
  double micro = 0.0;
  std::size_t n_outputs = 0;
  std::size_t n_sentences = 0;
  std::size_t n_attributed = 0;

  bool operator==(const AISScores&) const = default;
};

/// strict: share of outputs whose sentences are all attributed; macro: mean
/// per-output attributed fraction; micro: attributed sentences over all
/// sentences. Throws EMPTY_INPUT for an empty list or an empty vector.
AISScores ais_aggregate(const std::vector<std::vector<bool>>& per_output);

/// Clipped n-gram precision of `candidate` against `reference`, n in {1,2}.
/// A candidate with fewer than n tokens scores 0.
double rouge_n_precision(std::string_view candidate, std::string_view reference, std::size_t n);

/// Sum over candidate sentences of LCS(sentence, whole reference), divided
/// by the total candidate sentence length. Empty candidate scores 0.
double rouge_lsum_precision(std::string_view candidate, std::string_view reference);

struct Uniqueness {
  double value = 1.0;
  bool defined = true;  // false when the text has fewer than n tokens
};

/// Distinct n-grams over total n-grams.
Uniqueness ngram_uniqueness(std::string_view text, std::size_t n);

}  // namespace planrag::metrics
