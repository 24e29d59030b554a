#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "planrag/backends/cache.hpp"
#include "planrag/backends/offline.hpp"
#include "planrag/error.hpp"
#include "test_util.hpp"

using namespace planrag;
using namespace planrag::backends;

namespace {

class FixedSearch : public SearchEngine {
 public:
  std::vector<Snippet> results;

 protected:
  std::vector<Snippet> do_search(std::string_view, int) override { return results; }
};

class FixedQA : public QuestionAnswerer {
 public:
  std::vector<ScoredAnswer> results;

 protected:
  std::vector<ScoredAnswer> do_answer(std::string_view, std::span<const Snippet>) override { return results; }
};

class ConstantEntail : public EntailmentScorer {
 public:
  double value = 0.0;

 protected:
  double do_entail(std::string_view, std::string_view) override { return value; }
};

Snippet snip(std::string id, std::string body) { return Snippet{std::move(id), "", std::move(body), "", 1, ""}; }

}  // namespace

TEST(Generator, EmptyPromptRejected) {
  ScriptedGenerator gen;
  gen.add_rule([](std::string_view, const SamplingParams&) { return std::optional<std::string>("x"); });
  EXPECT_EQ(testutil::error_code_of([&] { gen.generate("", {}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(gen.calls(), 0u);
}

TEST(Generator, PromptLimitCountsCodePoints) {
  ScriptedGenerator gen(3);
  gen.add_rule([](std::string_view, const SamplingParams&) { return std::optional<std::string>("ok"); });
  EXPECT_EQ(gen.generate("\xC3\xA9\xC3\xA9\xC3\xA9", {}), "ok");  // three code points, six bytes
  EXPECT_EQ(testutil::error_code_of([&] { gen.generate("abcd", {}); }), ErrorCode::kPromptTooLong);
}

TEST(Generator, BadSamplingParams) {
  ScriptedGenerator gen;
  SamplingParams p;
  p.top_p = 0.0;
  EXPECT_EQ(testutil::error_code_of([&] { gen.generate("x", p); }), ErrorCode::kInvalidArgument);
  p = {};
  p.temperature = -1;
  EXPECT_EQ(testutil::error_code_of([&] { gen.generate("x", p); }), ErrorCode::kInvalidArgument);
  p = {};
  p.max_output_tokens = 0;
  EXPECT_EQ(testutil::error_code_of([&] { gen.generate("x", p); }), ErrorCode::kInvalidArgument);
}

TEST(ScriptedGenerator, TableThenRulesThenEmpty) {
  ScriptedGenerator gen;
  gen.add_response("hello", "table");
  gen.add_rule([](std::string_view p, const SamplingParams& s) -> std::optional<std::string> {
    if (p.find("rule") == std::string_view::npos) return std::nullopt;
    return "rule seed " + std::to_string(s.seed);
  });
  SamplingParams s;
  s.seed = 4;
  EXPECT_EQ(gen.generate("hello", s), "table");
  EXPECT_EQ(gen.generate("a rule prompt", s), "rule seed 4");
  EXPECT_EQ(gen.generate("a rule prompt", s), gen.generate("a rule prompt", s));
  EXPECT_EQ(testutil::error_code_of([&] { gen.generate("other", s); }), ErrorCode::kEmptyResponse);
}

TEST(Search, PostconditionsEnforced) {
  FixedSearch search;
  search.results = {snip("a", "x"), snip("b", ""), snip("a", "dup"), snip("c", "y"), snip("d", "z")};
  const auto out = search.search("q", 2);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].id, "a");
  EXPECT_EQ(out[1].id, "c");
  EXPECT_EQ(out[0].rank, 1);
  EXPECT_EQ(out[1].rank, 2);
  EXPECT_EQ(out[1].origin_query, "q");
}

TEST(Search, PreconditionsChecked) {
  FixedSearch search;
  EXPECT_EQ(testutil::error_code_of([&] { search.search("", 3); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(testutil::error_code_of([&] { search.search("q", 0); }), ErrorCode::kInvalidArgument);
}

TEST(Answer, SortedFilteredAndClamped) {
  FixedQA qa;
  qa.results = {{"low", 0.2, "p2"}, {"tie-b", 0.8, "p2"}, {"tie-a", 0.8, "p1"}, {"ghost", 0.9, "nope"},
                {"over", 1.7, "p1"}};
  const std::vector<Snippet> passages = {snip("p1", "one"), snip("p2", "two")};
  const auto out = qa.answer("q?", passages);
  ASSERT_EQ(out.size(), 4u);
  EXPECT_EQ(out[0].text, "over");
  EXPECT_DOUBLE_EQ(out[0].confidence, 1.0);
  EXPECT_EQ(out[1].source_snippet_id, "p1");
  EXPECT_EQ(out[2].source_snippet_id, "p2");
  EXPECT_EQ(out[3].text, "low");
}

TEST(Answer, EmptyPassagesShortCircuit) {
  FixedQA qa;
  qa.results = {{"x", 1.0, "p"}};
  EXPECT_TRUE(qa.answer("q?", {}).empty());
  EXPECT_EQ(qa.calls(), 0u);
  EXPECT_EQ(testutil::error_code_of([&] { qa.answer("", {}); }), ErrorCode::kInvalidArgument);
}

TEST(Entail, ClampsAndRejectsEmpty) {
  ConstantEntail e;
  e.value = 3.0;
  EXPECT_DOUBLE_EQ(e.entail("p", "h"), 1.0);
  e.value = std::nan("");
  EXPECT_DOUBLE_EQ(e.entail("p", "h"), 0.0);
  EXPECT_EQ(testutil::error_code_of([&] { e.entail("", "h"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(testutil::error_code_of([&] { e.entail("p", ""); }), ErrorCode::kInvalidArgument);
}

TEST(PhraseKey, WordBoundaries) {
  EXPECT_EQ(phrase_key("Hello, World!"), " hello world ");
  EXPECT_TRUE(contains_phrase("We saw the Red Fox.", "red fox"));
  EXPECT_FALSE(contains_phrase("We saw the Redfox.", "red fox"));
  EXPECT_FALSE(contains_phrase("a bc", "b"));
}

TEST(ExactMatchQA, RegisteredFactFound) {
  ExactMatchQA qa;
  qa.register_answer("Where was she born?", "born in Detroit", 1.0);
  const std::vector<Snippet> passages = {snip("p2", "She was born in Detroit."), snip("p1", "Unrelated."),
                                         snip("p0", "Records: born in Detroit, Michigan")};
  const auto out = qa.answer("where was she born", passages);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].text, "born in Detroit");
  EXPECT_DOUBLE_EQ(out[0].confidence, 1.0);
  EXPECT_EQ(out[0].source_snippet_id, "p0");  // smallest matching id
}

TEST(ExactMatchQA, AbsentFactOrUnknownQuestion) {
  ExactMatchQA qa;
  qa.register_answer("Where was she born?", "born in Detroit", 1.0);
  const std::vector<Snippet> passages = {snip("p1", "She moved to Ohio.")};
  EXPECT_TRUE(qa.answer("Where was she born?", passages).empty());
  EXPECT_TRUE(qa.answer("What did she write?", passages).empty());
  EXPECT_THROW(qa.register_answer("?", "x", 1.0), Error);
  EXPECT_THROW(qa.register_answer("q q q", "", 1.0), Error);
}

TEST(FactOracle, SubsetRule) {
  FactOracleEntailment oracle;
  oracle.register_fact("f1", "won the prize in 1999");
  oracle.register_fact("f2", "lives in Paris");
  const std::string fact = "She won the prize in 1999.";
  EXPECT_DOUBLE_EQ(oracle.entail("Doc text. " + fact + " More.", fact), 1.0);
  EXPECT_DOUBLE_EQ(oracle.entail(fact, fact), 1.0);
  EXPECT_DOUBLE_EQ(oracle.entail("She won the prize in 1999 and lives in Paris.", "Made-up claim."), 0.0);
  EXPECT_DOUBLE_EQ(oracle.entail(fact, "She won the prize in 1999 and lives in Paris."), 0.0);
  EXPECT_EQ(oracle.facts_in("lives in Paris; won the prize in 1999"), (std::vector<std::string>{"f1", "f2"}));
}

TEST(CacheKey, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(CacheKey, FieldOrderIrrelevant) {
  const auto a = nlohmann::json::parse(R"({"query":"lorrie moore","k":5,"extra":{"b":1,"a":2}})");
  const auto b = nlohmann::json::parse(R"({"extra":{"a":2,"b":1},"k":5,"query":"lorrie moore"})");
  const auto ka = make_cache_key(BackendKind::kSearch, a);
  const auto kb = make_cache_key(BackendKind::kSearch, b);
  EXPECT_EQ(ka, kb);
  EXPECT_EQ(ka.request_digest.size(), 64u);
  EXPECT_NE(ka, make_cache_key(BackendKind::kQa, a));
}

TEST(CacheKey, PromptWhitespaceNormalised) {
  const auto a = make_cache_key(BackendKind::kGenerate, {{"prompt", "Write  a\nparagraph "}, {"seed", 1}});
  const auto b = make_cache_key(BackendKind::kGenerate, {{"prompt", "Write a paragraph"}, {"seed", 1}});
  const auto c = make_cache_key(BackendKind::kGenerate, {{"prompt", "Write a paragraph"}, {"seed", 2}});
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  // Only prompt text is normalised.
  EXPECT_NE(make_cache_key(BackendKind::kSearch, {{"query", "a  b"}}),
            make_cache_key(BackendKind::kSearch, {{"query", "a b"}}));
}

TEST(ResponseCache, RoundTripMissAndPersistence) {
  testutil::TempDir dir;
  const auto key = make_cache_key(BackendKind::kSearch, {{"query", "q"}, {"k", 1}});
  {
    ResponseCache cache(dir.path());
    EXPECT_FALSE(cache.get(key).has_value());
    cache.put(key, {{"query", "q"}, {"k", 1}}, {{"answer", 42}});
    EXPECT_EQ(cache.get(key), (nlohmann::json{{"answer", 42}}));
  }
  ResponseCache reopened(dir.path());
  EXPECT_EQ(reopened.get(key), (nlohmann::json{{"answer", 42}}));
  std::ifstream in(dir.path() / key.request_digest);
  const auto entry = nlohmann::json::parse(in);
  EXPECT_TRUE(entry.contains("request"));
  EXPECT_TRUE(entry.contains("timestamp"));
}

TEST(ResponseCache, CorruptEntryIsCacheIo) {
  testutil::TempDir dir;
  ResponseCache cache(dir.path());
  const auto key = make_cache_key(BackendKind::kQa, {{"question", "q"}});
  std::ofstream(dir.path() / key.request_digest) << "{not json";
  EXPECT_EQ(testutil::error_code_of([&] { cache.get(key); }), ErrorCode::kCacheIo);
}

TEST(CachingDecorators, TransparentAndCounting) {
  testutil::TempDir dir;
  auto cache = std::make_shared<ResponseCache>(dir.path());
  auto gen = std::make_shared<ScriptedGenerator>();
  gen->add_rule([](std::string_view p, const SamplingParams& s) {
    return std::optional<std::string>(std::string(p) + "#" + std::to_string(s.seed));
  });
  auto search = std::make_shared<FixedSearch>();
  search->results = {snip("a", "alpha"), snip("b", "beta")};
  auto qa = std::make_shared<FixedQA>();
  qa->results = {{"alpha", 0.7, "a"}};
  auto entail = std::make_shared<ConstantEntail>();
  entail->value = 0.6;
  const BackendSet inner{gen, search, qa, entail};

  const auto run = [&] {
    const auto set = with_cache(inner, cache);
    SamplingParams s;
    s.seed = 3;
    const auto text = set.generator->generate("prompt", s);
    const auto hits = set.search->search("q", 2);
    const auto answers = set.qa->answer("q?", hits);
    const double score = set.entail->entail("p", "h");
    return std::make_tuple(text, nlohmann::json(hits).dump(), nlohmann::json(answers).dump(), score);
  };
  const auto cold = run();
  const auto warm = run();
  EXPECT_EQ(cold, warm);
  EXPECT_EQ(std::get<0>(cold), "prompt#3");
  EXPECT_EQ(gen->calls() + search->calls() + qa->calls() + entail->calls(), 4u);
}

TEST(CachingDecorators, CorruptEntryFallsThrough) {
  testutil::TempDir dir;
  auto cache = std::make_shared<ResponseCache>(dir.path());
  auto entail = std::make_shared<ConstantEntail>();
  entail->value = 0.25;
  CachingEntailmentScorer cached(entail, cache);
  EXPECT_DOUBLE_EQ(cached.entail("p", "h"), 0.25);
  for (const auto& f : std::filesystem::directory_iterator(dir.path())) std::ofstream(f.path()) << "garbage";
  EXPECT_DOUBLE_EQ(cached.entail("p", "h"), 0.25);
  EXPECT_EQ(entail->calls(), 2u);
}
