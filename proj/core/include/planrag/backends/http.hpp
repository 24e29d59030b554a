#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>

#include <nlohmann/json.hpp>

#include "planrag/backends/interfaces.hpp"

namespace planrag::backends {

struct HttpEndpoint {
  std::string url;            // e.g. "http://localhost:8080/v1/generate"
  std::string method = "POST";  // search also accepts "GET"
  std::string token_env;      // bearer token is read from this variable when set
  int timeout_ms = 30000;
  int max_attempts = 3;
  int backoff_base_ms = 500;
  double rate_per_second = 0.0;  // 0 disables the token bucket
  int max_in_flight = 4;
};

/// Blocking token bucket; capacity equals one second of tokens (at least 1).
class TokenBucket {
 public:
  explicit TokenBucket(double rate_per_second);
  void acquire();

 private:
  using Clock = std::chrono::steady_clock;
  double rate_;
  double capacity_;
  double tokens_;
  Clock::time_point last_;
  std::mutex mu_;
};

/// JSON-over-HTTP transport shared by the clients below. Transport failures
/// and 5xx responses are retried with exponential backoff; 4xx responses
/// fail immediately. Exhausted retries raise BACKEND_UNAVAILABLE.
class JsonTransport {
 public:
  explicit JsonTransport(HttpEndpoint endpoint);
  ~JsonTransport();
  JsonTransport(const JsonTransport&) = delete;
  JsonTransport& operator=(const JsonTransport&) = delete;

  nlohmann::json call(const nlohmann::json& body);

  const HttpEndpoint& endpoint() const { return endpoint_; }

  struct Target;

 private:
  HttpEndpoint endpoint_;
  std::unique_ptr<Target> target_;
  std::unique_ptr<TokenBucket> bucket_;
  std::counting_semaphore<> in_flight_;
};

/// POST {prompt, temperature, top_p, seed, max_output_tokens} -> {text}.
class HttpGenerator : public Generator {
 public:
  explicit HttpGenerator(HttpEndpoint endpoint, std::size_t max_prompt_chars = kDefaultMaxPromptChars);

 protected:
  std::string do_generate(std::string_view prompt, const SamplingParams& params) override;

 private:
  JsonTransport transport_;
};

/// {query, k} -> [{title, text, url}]. Snippet ids are derived from the URL
/// (or the rank when the URL is missing) so they are stable across calls.
class HttpSearchEngine : public SearchEngine {
 public:
  explicit HttpSearchEngine(HttpEndpoint endpoint);

 protected:
  std::vector<Snippet> do_search(std::string_view query, int k) override;

 private:
  JsonTransport transport_;
};

/// {question, passages: [{id, title, text}]} -> [{text, confidence, source_id}].
class HttpQuestionAnswerer : public QuestionAnswerer {
 public:
  explicit HttpQuestionAnswerer(HttpEndpoint endpoint);

 protected:
  std::vector<ScoredAnswer> do_answer(std::string_view question, std::span<const Snippet> passages) override;

 private:
  JsonTransport transport_;
};

/// {premise, hypothesis} -> {score}.
class HttpEntailmentScorer : public EntailmentScorer {
 public:
  explicit HttpEntailmentScorer(HttpEndpoint endpoint);

 protected:
  double do_entail(std::string_view premise, std::string_view hypothesis) override;

 private:
  JsonTransport transport_;
};

}  // namespace planrag::backends
