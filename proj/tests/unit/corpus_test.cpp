#include <algorithm>
#include <cmath>
#include <fstream>

#include <gtest/gtest.h>

#include "planrag/corpus/document_index.hpp"
#include "planrag/corpus/entity_list.hpp"
#include "planrag/corpus/synthetic_world.hpp"
#include "planrag/backends/offline.hpp"
#include "planrag/pipeline/prompts.hpp"
#include "planrag/textproc.hpp"
#include "test_util.hpp"

using namespace planrag;
using namespace planrag::corpus;

namespace {

DocumentIndex toy_index() {
  return DocumentIndex({{"d1", "Alpha", "apple banana apple", "https://t/1"},
                        {"d2", "Beta", "banana cherry", "https://t/2"},
                        {"d3", "Gamma", "cherry cherry date", "https://t/3"}});
}

std::vector<std::string> ids(const std::vector<backends::Snippet>& s) {
  std::vector<std::string> out;
  for (const auto& x : s) out.push_back(x.id);
  return out;
}

}  // namespace

TEST(DocumentIndex, HandScoredRanking) {
  const auto index = toy_index();
  // apple: df 1, cherry: df 2, N = 3; score = sum tf * ln(1 + N/df)
  const double d1 = 2 * std::log(1 + 3.0 / 1);
  const double d2 = 1 * std::log(1 + 3.0 / 2);
  const double d3 = 2 * std::log(1 + 3.0 / 2);
  ASSERT_GT(d1, d3);
  ASSERT_GT(d3, d2);
  EXPECT_EQ(ids(index.search("apple cherry", 2)), (std::vector<std::string>{"d1", "d3"}));
  EXPECT_DOUBLE_EQ(index.idf("cherry"), std::log(2.5));
  EXPECT_DOUBLE_EQ(index.idf("missing"), 0.0);
}

TEST(DocumentIndex, TiesBreakById) {
  EXPECT_EQ(ids(toy_index().search("banana", 5)), (std::vector<std::string>{"d1", "d2"}));
}

TEST(DocumentIndex, FewerHitsThanK) {
  const auto hits = toy_index().search("apple banana cherry", 5);
  ASSERT_EQ(hits.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(hits[static_cast<std::size_t>(i)].rank, i + 1);
  EXPECT_EQ(hits[0].source_url, "https://t/1");
}

TEST(DocumentIndex, NoMatchesAndTitleTokens) {
  const auto index = toy_index();
  EXPECT_TRUE(index.search("zebra", 3).empty());
  EXPECT_TRUE(index.search("...", 3).empty());
  EXPECT_EQ(ids(index.search("gamma", 3)), (std::vector<std::string>{"d3"}));
}

TEST(DocumentIndex, SnippetTruncation) {
  std::string body;
  for (int i = 0; i < 100; ++i) body += "w" + std::to_string(i) + "  ";
  DocumentIndex index({{"d", "T", body, ""}}, 80);
  const auto hits = index.search("w5", 1);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(textproc::tokenize(hits[0].body).size(), 80u);
  EXPECT_EQ(hits[0].body.substr(0, 6), "w0 w1 ");
}

TEST(DocumentIndex, RejectsDuplicateIds) {
  EXPECT_EQ(testutil::error_code_of([] { DocumentIndex({{"a", "", "x", ""}, {"a", "", "y", ""}}); }),
            ErrorCode::kInvalidParams);
}

TEST(DocumentIndex, LoadDirectoryAndJson) {
  testutil::TempDir dir;
  std::filesystem::create_directories(dir.path() / "sub");
  std::ofstream(dir.path() / "b.txt") << "Second\nhttps://example.org/b\nBody of b.\n";
  std::ofstream(dir.path() / "sub" / "a.txt") << "First\nBody line one.\nline two\n";
  std::ofstream(dir.path() / "empty.txt") << "Only a title\n";
  const auto index = DocumentIndex::load_directory(dir.path());
  ASSERT_EQ(index.docs().size(), 2u);
  const auto hits = index.search("body", 5);
  ASSERT_EQ(hits.size(), 2u);
  const auto& b = hits[0].id == "b.txt" ? hits[0] : hits[1];
  EXPECT_EQ(b.source_url, "https://example.org/b");
  EXPECT_EQ(b.title, "Second");
  const auto& a = hits[0].id == "sub/a.txt" ? hits[0] : hits[1];
  EXPECT_EQ(a.body, "Body line one. line two");

  const auto copy = DocumentIndex::from_json(index.to_json());
  EXPECT_EQ(copy.to_json(), index.to_json());
  EXPECT_EQ(testutil::error_code_of([&] { DocumentIndex::load_directory(dir.path() / "nope"); }),
            ErrorCode::kFileNotFound);
}

TEST(EntityList, Disambiguator) {
  const auto q = parse_entity_line("Gerhard Fischer (inventor)");
  EXPECT_EQ(q.name, "Gerhard Fischer");
  EXPECT_EQ(q.disambiguator, "inventor");
  EXPECT_EQ(q.rendered(), "Gerhard Fischer (inventor)");
}

TEST(EntityList, CommentsAndBlanksSkipped) {
  testutil::TempDir dir;
  std::ofstream(dir.path() / "list.txt") << "# comment\n\nLorrie Moore\n";
  const auto list = load_entity_list(dir.path() / "list.txt");
  ASSERT_EQ(list.size(), 1u);
  EXPECT_EQ(list[0].name, "Lorrie Moore");
  EXPECT_FALSE(list[0].disambiguator.has_value());
}

TEST(EntityList, EmptyNameIsParseError) {
  EXPECT_EQ(testutil::error_code_of([] { parse_entity_line("(only paren)"); }), ErrorCode::kParseError);
  testutil::TempDir dir;
  std::ofstream(dir.path() / "bad.txt") << "Fine Name\n(only paren)\n";
  try {
    load_entity_list(dir.path() / "bad.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
  }
  EXPECT_EQ(testutil::error_code_of([&] { load_entity_list(dir.path() / "missing.txt"); }), ErrorCode::kFileNotFound);
}

TEST(SyntheticWorld, Deterministic) {
  const auto a = build_synthetic_world({});
  const auto b = build_synthetic_world({});
  EXPECT_EQ(a.index()->to_json(), b.index()->to_json());
  EXPECT_EQ(a.fact_registry, b.fact_registry);
  WorldParams other;
  other.seed = 8;
  EXPECT_NE(build_synthetic_world(other).fact_registry, a.fact_registry);
}

TEST(SyntheticWorld, ParameterChecks) {
  WorldParams p;
  p.generic_coverage = p.facts_per_entity;
  EXPECT_EQ(testutil::error_code_of([&] { build_synthetic_world(p); }), ErrorCode::kInvalidParams);
  p = {};
  p.generic_coverage = 0;
  EXPECT_EQ(testutil::error_code_of([&] { build_synthetic_world(p); }), ErrorCode::kInvalidParams);
  p = {};
  p.n_entities = 0;
  EXPECT_EQ(testutil::error_code_of([&] { build_synthetic_world(p); }), ErrorCode::kInvalidParams);
}

TEST(SyntheticWorld, Shape) {
  const auto w = build_synthetic_world({});
  ASSERT_EQ(w.entities.size(), 8u);
  EXPECT_EQ(w.documents.size(), 8u * 7u);
  EXPECT_EQ(w.fact_registry.size(), 48u);
  for (const auto& e : w.entities) {
    ASSERT_EQ(e.aspects.size(), 6u);
    const auto name = textproc::tokenize(e.query.name);
    for (const auto& d : w.documents) {
      if (d.id == e.slug) {
        for (int j = 0; j < 6; ++j) {
          EXPECT_EQ(backends::contains_phrase(d.body, e.aspects[static_cast<std::size_t>(j)].fact_sentence), j < 2);
        }
      } else if (d.id.rfind(e.slug + "-", 0) == 0) {
        for (const auto& t : name) EXPECT_EQ(backends::phrase_key(d.title + " " + d.body).find(" " + t + " "), std::string::npos);
      }
    }
  }
}

TEST(SyntheticWorld, SearchReachability) {
  const auto w = build_synthetic_world({});
  const auto index = w.index();
  for (const auto& e : w.entities) {
    const auto by_name = index->search(e.query.rendered(), 5);
    ASSERT_FALSE(by_name.empty());
    EXPECT_EQ(by_name[0].id, e.slug);
    EXPECT_EQ(by_name.size(), 1u);  // aspect docs never mention the name
    for (const auto& a : e.aspects) {
      const auto hits = index->search(a.keywords[0], 3);
      ASSERT_FALSE(hits.empty());
      EXPECT_EQ(hits[0].id, e.slug + "-" + a.name);
      // The question query must surface the aspect doc within the per-query budget.
      const auto by_question = ids(index->search(a.question, 3));
      EXPECT_NE(std::find(by_question.begin(), by_question.end(), e.slug + "-" + a.name), by_question.end());
    }
  }
}

TEST(SyntheticWorld, OutlineResponseNamesAspects) {
  WorldParams p;
  p.n_entities = 1;
  p.facts_per_entity = 2;
  p.generic_coverage = 1;
  const auto w = build_synthetic_world(p);
  const auto set = w.backends();
  const auto& e = w.entities[0];
  const auto snippets = w.index()->search(e.query.rendered(), 5);
  const auto prompt =
      pipeline::render_prompt(pipeline::TemplateId::kOutline, {.entity = e.query.rendered(), .snippets = snippets});
  const auto text = set.generator->generate(prompt, {});
  EXPECT_EQ(text, "Paragraph 1: Describe the birthplace of " + e.query.rendered() +
                      ".\nParagraph 2: Describe the education of " + e.query.rendered() + ".");
}

TEST(SyntheticWorld, QaAndEntailmentRegistries) {
  const auto w = build_synthetic_world({});
  const auto set = w.backends();
  const auto& e = w.entities[1];
  const auto& a = e.aspects[4];
  const auto hits = w.index()->search(a.question, 3);
  const auto answers = set.qa->answer(a.question, hits);
  ASSERT_FALSE(answers.empty());
  EXPECT_EQ(answers[0].text, a.fact_sentence);
  EXPECT_DOUBLE_EQ(answers[0].confidence, 1.0);
  EXPECT_EQ(answers[0].source_snippet_id, e.slug + "-" + a.name);
  for (std::size_t i = 1; i < answers.size(); ++i) {
    EXPECT_EQ(answers[i].text, e.distractor);
    EXPECT_DOUBLE_EQ(answers[i].confidence, kDistractorConfidence);
  }
  EXPECT_TRUE(set.qa->answer(a.detail_question, hits).empty());

  EXPECT_DOUBLE_EQ(set.entail->entail(hits[0].passage(), a.fact_sentence), 1.0);
  EXPECT_DOUBLE_EQ(set.entail->entail(a.fact_sentence, a.fact_sentence), 1.0);
  EXPECT_DOUBLE_EQ(set.entail->entail(hits[0].passage(), fabricated_sentence(e.query.name, a.name, 0)), 0.0);
}
