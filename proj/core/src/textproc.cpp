#include "planrag/textproc.hpp"

#include <fstream>

#include "planrag/error.hpp"

namespace planrag::textproc {
namespace {

bool is_ascii_punct(unsigned char c) {
  return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
         (c >= 0x7B && c <= 0x7E);
}

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

std::string strip_punct(std::string_view word) {
  std::size_t begin = 0;
  std::size_t end = word.size();
  while (begin < end && is_ascii_punct(static_cast<unsigned char>(word[begin]))) ++begin;
  while (end > begin && is_ascii_punct(static_cast<unsigned char>(word[end - 1]))) --end;
  return std::string(word.substr(begin, end - begin));
}

}  // namespace

std::size_t whitespace_length(std::string_view text, std::size_t pos) {
  if (pos >= text.size()) return 0;
  const auto b0 = static_cast<unsigned char>(text[pos]);
  if (b0 == ' ' || (b0 >= 0x09 && b0 <= 0x0D)) return 1;
  const auto at = [&](std::size_t off) {
    return pos + off < text.size() ? static_cast<unsigned char>(text[pos + off]) : 0;
  };
  // U+0085, U+00A0
  if (b0 == 0xC2 && (at(1) == 0x85 || at(1) == 0xA0)) return 2;
  // U+1680
  if (b0 == 0xE1 && at(1) == 0x9A && at(2) == 0x80) return 3;
  if (b0 == 0xE2 && at(1) == 0x80) {
    const auto b2 = at(2);
    // U+2000..U+200A, U+2028, U+2029, U+202F
    if ((b2 >= 0x80 && b2 <= 0x8A) || b2 == 0xA8 || b2 == 0xA9 || b2 == 0xAF) return 3;
  }
  // U+205F
  if (b0 == 0xE2 && at(1) == 0x81 && at(2) == 0x9F) return 3;
  // U+3000
  if (b0 == 0xE3 && at(1) == 0x80 && at(2) == 0x80) return 3;
  return 0;
}

TokenSequence tokenize(std::string_view text) {
  TokenSequence tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (const auto ws = whitespace_length(text, pos); ws > 0) {
      pos += ws;
      continue;
    }
    const std::size_t start = pos;
    while (pos < text.size() && whitespace_length(text, pos) == 0) ++pos;
    std::string token = strip_punct(text.substr(start, pos - start));
    if (token.empty()) continue;
    for (auto& c : token) c = ascii_lower(c);
    tokens.push_back(std::move(token));
  }
  return tokens;
}

std::string join_tokens(const TokenSequence& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (const auto ws = whitespace_length(text, pos); ws > 0) {
      pending_space = !out.empty();
      pos += ws;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(text[pos++]);
  }
  return out;
}

std::string trim(std::string_view text) {
  std::size_t begin = 0;
  while (begin < text.size()) {
    const auto ws = whitespace_length(text, begin);
    if (ws == 0) break;
    begin += ws;
  }
  std::size_t end = text.size();
  // Whitespace code points are at most 3 bytes; probe each possible start.
  for (bool trimmed = true; trimmed && end > begin;) {
    trimmed = false;
    for (std::size_t len = 1; len <= 3 && len <= end - begin; ++len) {
      if (whitespace_length(text, end - len) == len) {
        end -= len;
        trimmed = true;
        break;
      }
    }
  }
  return std::string(text.substr(begin, end - begin));
}

SentenceSplitter::SentenceSplitter() : abbreviations_(default_abbreviations()) {}

SentenceSplitter::SentenceSplitter(std::set<std::string> abbreviations)
    : abbreviations_(std::move(abbreviations)) {}

const std::set<std::string>& SentenceSplitter::default_abbreviations() {
  static const std::set<std::string> kDefault = {"dr",  "mr",  "mrs", "ms", "prof", "e.g",
                                                 "i.e", "etc", "vs",  "no", "vol"};
  return kDefault;
}

bool SentenceSplitter::is_abbreviation(std::string_view text, std::size_t period_pos) const {
  std::size_t start = period_pos;
  while (start > 0) {
    bool ws = false;
    for (std::size_t len = 1; len <= 3 && len <= start; ++len) {
      if (whitespace_length(text, start - len) == len) {
        ws = true;
        break;
      }
    }
    if (ws) break;
    --start;
  }
  std::string word(text.substr(start, period_pos - start));
  std::size_t lead = 0;
  while (lead < word.size() && is_ascii_punct(static_cast<unsigned char>(word[lead]))) ++lead;
  word.erase(0, lead);
  for (auto& c : word) c = ascii_lower(c);
  return !word.empty() && abbreviations_.count(word) > 0;
}

std::vector<std::string> SentenceSplitter::split(std::string_view text) const {
  std::vector<std::string> sentences;
  const auto emit = [&](std::size_t begin, std::size_t end) {
    std::string s = trim(text.substr(begin, end - begin));
    if (!s.empty()) sentences.push_back(std::move(s));
  };

  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_terminator(text[i])) {
      ++i;
      continue;
    }
    std::size_t end = i + 1;
    while (end < text.size() && is_terminator(text[end])) ++end;

    bool boundary = false;
    std::size_t next = end;
    if (end == text.size()) {
      boundary = true;
    } else if (whitespace_length(text, end) > 0) {
      while (next < text.size()) {
        const auto ws = whitespace_length(text, next);
        if (ws == 0) break;
        next += ws;
      }
      boundary = next == text.size() || (text[next] >= 'A' && text[next] <= 'Z');
    }
    if (boundary && text[i] == '.' && end == i + 1 && is_abbreviation(text, i)) boundary = false;

    if (boundary) {
      emit(start, end);
      start = next;
      i = next;
    } else {
      i = end;
    }
  }
  if (start < text.size()) emit(start, text.size());
  return sentences;
}

std::vector<std::string> split_sentences(std::string_view text) {
  static const SentenceSplitter kSplitter;
  return kSplitter.split(text);
}

std::set<std::string> load_abbreviations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open abbreviation list " + path.string());
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    std::string entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    while (!entry.empty() && entry.back() == '.') entry.pop_back();
    for (auto& c : entry) c = ascii_lower(c);
    if (!entry.empty()) out.insert(std::move(entry));
  }
  return out;
}

NgramCounts ngrams(const TokenSequence& seq, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "n-gram order must be >= 1");
  NgramCounts counts;
  if (seq.size() < n) return counts;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) {
    std::string key = seq[i];
    for (std::size_t j = 1; j < n; ++j) {
      key.push_back(' ');
      key += seq[i + j];
    }
    ++counts[key];
  }
  return counts;
}

std::size_t ngram_total(const NgramCounts& counts) {
  std::size_t total = 0;
  for (const auto& [_, c] : counts) total += c;
  return total;
}

}  // namespace planrag::textproc
