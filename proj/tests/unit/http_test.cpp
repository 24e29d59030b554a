#include <atomic>
#include <cstdlib>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "planrag/backends/http.hpp"
#include "test_util.hpp"

using namespace planrag;
using namespace planrag::backends;

namespace {

class LocalServer {
 public:
  LocalServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }

  httplib::Server& server() { return server_; }
  HttpEndpoint endpoint(const std::string& path) const {
    HttpEndpoint e;
    e.url = "http://127.0.0.1:" + std::to_string(port_) + path;
    e.backoff_base_ms = 1;
    e.timeout_ms = 5000;
    return e;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST(Http, GeneratorSendsParamsAndBearerToken) {
  LocalServer srv;
  nlohmann::json seen;
  std::string auth;
  srv.server().Post("/gen", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(R"({"text":"generated"})", "application/json");
  });
  ::setenv("PLANRAG_TEST_TOKEN", "sekret", 1);
  auto endpoint = srv.endpoint("/gen");
  endpoint.token_env = "PLANRAG_TEST_TOKEN";
  HttpGenerator gen(endpoint);
  SamplingParams p;
  p.seed = 9;
  EXPECT_EQ(gen.generate("hi there", p), "generated");
  EXPECT_EQ(seen["prompt"], "hi there");
  EXPECT_EQ(seen["seed"], 9);
  EXPECT_DOUBLE_EQ(seen["top_p"].get<double>(), 0.9);
  EXPECT_EQ(seen["max_output_tokens"], 512);
  EXPECT_EQ(auth, "Bearer sekret");
  ::unsetenv("PLANRAG_TEST_TOKEN");
}

TEST(Http, RetriesServerErrorsThenSucceeds) {
  LocalServer srv;
  std::atomic<int> hits{0};
  srv.server().Post("/entail", [&](const httplib::Request&, httplib::Response& res) {
    if (++hits < 3) {
      res.status = 503;
      return;
    }
    res.set_content(R"({"score":0.75})", "application/json");
  });
  HttpEntailmentScorer scorer(srv.endpoint("/entail"));
  EXPECT_DOUBLE_EQ(scorer.entail("p", "h"), 0.75);
  EXPECT_EQ(hits.load(), 3);
}

TEST(Http, GivesUpAfterMaxAttempts) {
  LocalServer srv;
  std::atomic<int> hits{0};
  srv.server().Post("/entail", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 500;
  });
  HttpEntailmentScorer scorer(srv.endpoint("/entail"));
  EXPECT_EQ(testutil::error_code_of([&] { scorer.entail("p", "h"); }), ErrorCode::kBackendUnavailable);
  EXPECT_EQ(hits.load(), 3);
}

TEST(Http, ClientErrorsAreNotRetried) {
  LocalServer srv;
  std::atomic<int> hits{0};
  srv.server().Post("/gen", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 401;
  });
  HttpGenerator gen(srv.endpoint("/gen"));
  EXPECT_EQ(testutil::error_code_of([&] { gen.generate("x", {}); }), ErrorCode::kBackendUnavailable);
  EXPECT_EQ(hits.load(), 1);
}

TEST(Http, UnreachableHostIsBackendUnavailable) {
  HttpEndpoint e;
  e.url = "http://127.0.0.1:1/gen";
  e.backoff_base_ms = 1;
  e.timeout_ms = 500;
  HttpGenerator gen(e);
  EXPECT_EQ(testutil::error_code_of([&] { gen.generate("x", {}); }), ErrorCode::kBackendUnavailable);
}

TEST(Http, MalformedJsonIsBackendUnavailable) {
  LocalServer srv;
  srv.server().Post("/gen", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("not json", "text/plain");
  });
  HttpGenerator gen(srv.endpoint("/gen"));
  EXPECT_EQ(testutil::error_code_of([&] { gen.generate("x", {}); }), ErrorCode::kBackendUnavailable);
}

TEST(Http, SearchPostAndGet) {
  LocalServer srv;
  const auto reply = [](int k, httplib::Response& res) {
    nlohmann::json out = nlohmann::json::array();
    for (int i = 0; i < k + 1; ++i) {
      out.push_back({{"title", "T" + std::to_string(i)}, {"text", "body " + std::to_string(i)},
                     {"url", "https://x.example/" + std::to_string(i)}});
    }
    res.set_content(out.dump(), "application/json");
  };
  srv.server().Post("/search", [&](const httplib::Request& req, httplib::Response& res) {
    reply(nlohmann::json::parse(req.body)["k"].get<int>(), res);
  });
  srv.server().Get("/search", [&](const httplib::Request& req, httplib::Response& res) {
    EXPECT_EQ(req.get_param_value("query"), "lorrie moore");
    reply(std::stoi(req.get_param_value("k")), res);
  });

  HttpSearchEngine post(srv.endpoint("/search"));
  const auto hits = post.search("lorrie moore", 2);
  ASSERT_EQ(hits.size(), 2u);  // server over-returns, contract truncates
  EXPECT_EQ(hits[0].title, "T0");
  EXPECT_EQ(hits[1].rank, 2);
  EXPECT_EQ(hits[0].origin_query, "lorrie moore");
  EXPECT_EQ(hits[0].id.rfind("web:", 0), 0u);
  EXPECT_NE(hits[0].id, hits[1].id);

  auto get_endpoint = srv.endpoint("/search");
  get_endpoint.method = "GET";
  HttpSearchEngine get(get_endpoint);
  const auto again = get.search("lorrie moore", 2);
  ASSERT_EQ(again.size(), 2u);
  EXPECT_EQ(again[0].id, hits[0].id);  // ids derive from the URL
}

TEST(Http, QuestionAnswererWireFormat) {
  LocalServer srv;
  srv.server().Post("/qa", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    nlohmann::json out = nlohmann::json::array();
    for (const auto& p : body["passages"]) {
      out.push_back({{"text", p["text"]}, {"confidence", p["id"] == "a" ? 0.4 : 0.9}, {"source_id", p["id"]}});
    }
    res.set_content(out.dump(), "application/json");
  });
  HttpQuestionAnswerer qa(srv.endpoint("/qa"));
  const std::vector<Snippet> passages = {{"a", "A", "first", "", 1, ""}, {"b", "B", "second", "", 2, ""}};
  const auto answers = qa.answer("which?", passages);
  ASSERT_EQ(answers.size(), 2u);
  EXPECT_EQ(answers[0].source_snippet_id, "b");
  EXPECT_EQ(answers[0].text, "second");
}

TEST(TokenBucket, LimitsRate) {
  TokenBucket bucket(50.0);
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 75; ++i) bucket.acquire();
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_GE(elapsed, 0.4);  // 50 burst tokens, then 25 more at 50/s
}
