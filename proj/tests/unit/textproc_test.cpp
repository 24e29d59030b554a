#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "planrag/error.hpp"
#include "planrag/textproc.hpp"

namespace tp = planrag::textproc;
using planrag::Error;
using planrag::ErrorCode;

TEST(Tokenize, StripsPunctuationAndLowercases) {
  EXPECT_EQ(tp::tokenize("Lorrie Moore, writer."), (tp::TokenSequence{"lorrie", "moore", "writer"}));
}

TEST(Tokenize, EmptyInput) { EXPECT_TRUE(tp::tokenize("").empty()); }

TEST(Tokenize, CollapsesWhitespaceKeepsDuplicates) {
  EXPECT_EQ(tp::tokenize("a  b\ta"), (tp::TokenSequence{"a", "b", "a"}));
}

TEST(Tokenize, InnerPunctuationSurvives) {
  EXPECT_EQ(tp::tokenize("(e.g., don't!)"), (tp::TokenSequence{"e.g", "don't"}));
}

TEST(Tokenize, PurePunctuationTokensVanish) { EXPECT_TRUE(tp::tokenize(" -- ... !? ").empty()); }

TEST(Tokenize, UnicodeSpacesSeparate) {
  // U+00A0 and U+3000
  EXPECT_EQ(tp::tokenize("a\xC2\xA0" "b\xE3\x80\x80" "c"), (tp::TokenSequence{"a", "b", "c"}));
}

TEST(Tokenize, NonAsciiBytesPreserved) {
  EXPECT_EQ(tp::tokenize("Ramsès IV"), (tp::TokenSequence{"ramsès", "iv"}));
}

TEST(SplitSentences, TwoSentences) {
  EXPECT_EQ(tp::split_sentences("She won. She wrote."), (std::vector<std::string>{"She won.", "She wrote."}));
}

TEST(SplitSentences, AbbreviationDoesNotSplit) {
  EXPECT_EQ(tp::split_sentences("Dr. Smith works at NeurIPS."),
            (std::vector<std::string>{"Dr. Smith works at NeurIPS."}));
}

TEST(SplitSentences, Empty) { EXPECT_TRUE(tp::split_sentences("").empty()); }

TEST(SplitSentences, LowercaseContinuationDoesNotSplit) {
  EXPECT_EQ(tp::split_sentences("It cost 3. million dollars."), (std::vector<std::string>{"It cost 3. million dollars."}));
}

TEST(SplitSentences, TerminatorRunsAndQuestionMarks) {
  EXPECT_EQ(tp::split_sentences("Really?! Yes. Fine"), (std::vector<std::string>{"Really?!", "Yes.", "Fine"}));
}

TEST(SplitSentences, WhitespaceOnlyYieldsNothing) { EXPECT_TRUE(tp::split_sentences(" \n\t ").empty()); }

TEST(SentenceSplitter, CustomAbbreviations) {
  tp::SentenceSplitter splitter({"approx"});
  EXPECT_EQ(splitter.split("It is approx. Ten metres. Dr. Who"),
            (std::vector<std::string>{"It is approx. Ten metres.", "Dr.", "Who"}));
}

TEST(SentenceSplitter, AbbreviationFileLoads) {
  const auto path = std::filesystem::temp_directory_path() / "planrag_abbrev_test.txt";
  {
    std::ofstream out(path);
    out << "# comment\n\nfig\nSt.\n";
  }
  const auto abbrevs = tp::load_abbreviations(path);
  EXPECT_EQ(abbrevs, (std::set<std::string>{"fig", "st"}));
  std::filesystem::remove(path);
  EXPECT_THROW(
      {
        try {
          tp::load_abbreviations(path);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::kFileNotFound);
          throw;
        }
      },
      Error);
}

TEST(Ngrams, Bigrams) {
  EXPECT_EQ(tp::ngrams({"a", "b", "a"}, 2), (tp::NgramCounts{{"a b", 1}, {"b a", 1}}));
}

TEST(Ngrams, TooShort) { EXPECT_TRUE(tp::ngrams({"a"}, 2).empty()); }

TEST(Ngrams, Multiplicity) { EXPECT_EQ(tp::ngrams({"a", "a", "a"}, 1), (tp::NgramCounts{{"a", 3}})); }

TEST(Ngrams, ZeroIsInvalid) {
  try {
    tp::ngrams({"a"}, 0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(Whitespace, CollapseAndTrim) {
  EXPECT_EQ(tp::collapse_whitespace("  a \n\t b  "), "a b");
  EXPECT_EQ(tp::trim("\n x y \t"), "x y");
}

namespace {

std::string random_text(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {"a", "B", "Dr.", "e.g.", ".", "!", "?", " ", "  ", "\n", "\t",
                                                  ",", "word", "Word", "x.", "Y", "...", "\xC2\xA0", "é", "'"};
  std::string s;
  const auto n = rng() % 40;
  for (std::size_t i = 0; i < n; ++i) s += pieces[rng() % pieces.size()];
  return s;
}

std::string strip_ws(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    if (const auto w = tp::whitespace_length(s, i); w > 0) {
      i += w;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

}  // namespace

TEST(TextprocProperties, RandomStrings) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto text = random_text(rng);
    const auto tokens = tp::tokenize(text);
    EXPECT_EQ(tp::tokenize(tp::join_tokens(tokens)), tokens) << text;
    std::string joined;
    for (const auto& s : tp::split_sentences(text)) {
      EXPECT_FALSE(tp::trim(s).empty());
      joined += s;
    }
    EXPECT_EQ(strip_ws(joined), strip_ws(text)) << text;
    for (std::size_t n = 1; n <= 3; ++n) {
      const std::size_t expected = tokens.size() >= n ? tokens.size() - n + 1 : 0;
      EXPECT_EQ(tp::ngram_total(tp::ngrams(tokens, n)), expected);
    }
  }
}
