#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace planrag::textproc {

/// Lowercase word tokens. Produced only by tokenize(), so no token is empty
/// and none contains whitespace.
using TokenSequence = std::vector<std::string>;

/// N-gram multiset. Keys are the n tokens joined by a single space, which is
/// unambiguous because tokens never contain whitespace.
using NgramCounts = std::map<std::string, std::size_t>;

/// Byte length of the whitespace code point starting at `pos` (ASCII
/// whitespace plus the Unicode space separators), or 0 if there is none.
std::size_t whitespace_length(std::string_view text, std::size_t pos);

/// Lowercase, split on whitespace, strip leading/trailing ASCII punctuation
/// from every token and drop tokens that end up empty.
TokenSequence tokenize(std::string_view text);

std::string join_tokens(const TokenSequence& tokens);

/// Collapse whitespace runs to one space and trim both ends. Case preserved.
std::string collapse_whitespace(std::string_view text);

std::string trim(std::string_view text);

class SentenceSplitter {
 public:
  /// Uses the built-in abbreviation list.
  SentenceSplitter();
  explicit SentenceSplitter(std::set<std::string> abbreviations);

  /// Splits after '.', '!' or '?' (runs of them count as one terminator)
  /// when followed by whitespace and then an uppercase ASCII letter or the
  /// end of the text. A '.' closing a known abbreviation never splits.
  std::vector<std::string> split(std::string_view text) const;

  const std::set<std::string>& abbreviations() const { return abbreviations_; }

  static const std::set<std::string>& default_abbreviations();

 private:
  bool is_abbreviation(std::string_view text, std::size_t period_pos) const;

  std::set<std::string> abbreviations_;
};

std::vector<std::string> split_sentences(std::string_view text);

/// One abbreviation per line, without its trailing period; blank lines and
/// lines starting with '#' are ignored. Throws FILE_NOT_FOUND.
std::set<std::string> load_abbreviations(const std::filesystem::path& path);

/// Exactly max(0, |seq| - n + 1) n-grams. Throws INVALID_ARGUMENT for n == 0.
NgramCounts ngrams(const TokenSequence& seq, std::size_t n);

std::size_t ngram_total(const NgramCounts& counts);

}  // namespace planrag::textproc
