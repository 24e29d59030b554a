#include "planrag/backends/http.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "planrag/backends/cache.hpp"
#include "planrag/error.hpp"

namespace planrag::backends {

struct JsonTransport::Target {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

namespace {

std::unique_ptr<JsonTransport::Target> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::kConfigInvalid, "endpoint url lacks a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  auto target = std::make_unique<JsonTransport::Target>();
  target->origin = url.substr(0, path_start);
  target->path = path_start == std::string::npos ? "/" : url.substr(path_start);
  return target;
}

}  // namespace

TokenBucket::TokenBucket(double rate_per_second)
    : rate_(rate_per_second), capacity_(std::max(1.0, rate_per_second)), tokens_(capacity_), last_(Clock::now()) {}

void TokenBucket::acquire() {
  for (;;) {
    std::chrono::duration<double> wait{};
    {
      std::lock_guard lock(mu_);
      const auto now = Clock::now();
      tokens_ = std::min(capacity_, tokens_ + std::chrono::duration<double>(now - last_).count() * rate_);
      last_ = now;
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
    }
    std::this_thread::sleep_for(wait);
  }
}

JsonTransport::JsonTransport(HttpEndpoint endpoint)
    : endpoint_(std::move(endpoint)),
      target_(split_url(endpoint_.url)),
      bucket_(endpoint_.rate_per_second > 0 ? std::make_unique<TokenBucket>(endpoint_.rate_per_second) : nullptr),
      in_flight_(std::max(1, endpoint_.max_in_flight)) {}

JsonTransport::~JsonTransport() = default;

nlohmann::json JsonTransport::call(const nlohmann::json& body) {
  httplib::Headers headers;
  if (!endpoint_.token_env.empty()) {
    if (const char* token = std::getenv(endpoint_.token_env.c_str()); token && *token) {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
  }
  const bool use_get = endpoint_.method == "GET";
  std::string last_error;
  const int attempts = std::max(1, endpoint_.max_attempts);

  for (int attempt = 1; attempt <= attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(std::chrono::milliseconds(endpoint_.backoff_base_ms) * (1 << (attempt - 2)));
    }
    if (bucket_) bucket_->acquire();

    httplib::Result res;
    {
      in_flight_.acquire();
      const std::unique_ptr<std::counting_semaphore<>, void (*)(std::counting_semaphore<>*)> slot(
          &in_flight_, [](std::counting_semaphore<>* s) { s->release(); });
      httplib::Client client(target_->origin);
      const auto timeout = std::chrono::milliseconds(endpoint_.timeout_ms);
      client.set_connection_timeout(timeout);
      client.set_read_timeout(timeout);
      client.set_write_timeout(timeout);
      if (use_get) {
        httplib::Params params;
        for (const auto& [k, v] : body.items()) params.emplace(k, v.is_string() ? v.get<std::string>() : v.dump());
        res = client.Get(target_->path, params, headers);
      } else {
        res = client.Post(target_->path, headers, body.dump(), "application/json");
      }
    }

    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else if (res->status >= 500) {
      last_error = "server error " + std::to_string(res->status);
    } else if (res->status >= 400) {
      throw Error(ErrorCode::kBackendUnavailable,
                  endpoint_.url + " rejected the request with status " + std::to_string(res->status));
    } else {
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kBackendUnavailable, endpoint_.url + " returned malformed JSON: " + e.what());
      }
    }
    spdlog::warn("{} attempt {}/{} failed: {}", endpoint_.url, attempt, attempts, last_error);
  }
  throw Error(ErrorCode::kBackendUnavailable,
              endpoint_.url + " unavailable after " + std::to_string(attempts) + " attempts: " + last_error);
}

HttpGenerator::HttpGenerator(HttpEndpoint endpoint, std::size_t max_prompt_chars)
    : Generator(max_prompt_chars), transport_(std::move(endpoint)) {}

std::string HttpGenerator::do_generate(std::string_view prompt, const SamplingParams& params) {
  nlohmann::json body = params;
  body["prompt"] = prompt;
  const auto response = transport_.call(body);
  if (!response.is_object() || !response.contains("text") || !response["text"].is_string()) {
    throw Error(ErrorCode::kBackendUnavailable, "generation response lacks a text field");
  }
  return response["text"].get<std::string>();
}

HttpSearchEngine::HttpSearchEngine(HttpEndpoint endpoint) : transport_(std::move(endpoint)) {}

std::vector<Snippet> HttpSearchEngine::do_search(std::string_view query, int k) {
  const auto response = transport_.call({{"query", query}, {"k", k}});
  if (!response.is_array()) throw Error(ErrorCode::kBackendUnavailable, "search response is not a list");
  std::vector<Snippet> out;
  for (const auto& item : response) {
    Snippet s;
    s.title = item.value("title", "");
    s.body = item.value("text", "");
    s.source_url = item.value("url", "");
    s.id = "web:" + sha256_hex(s.source_url.empty() ? std::string(query) + "#" + std::to_string(out.size() + 1)
                                                    : s.source_url)
                        .substr(0, 16);
    out.push_back(std::move(s));
  }
  return out;
}

HttpQuestionAnswerer::HttpQuestionAnswerer(HttpEndpoint endpoint) : transport_(std::move(endpoint)) {}

std::vector<ScoredAnswer> HttpQuestionAnswerer::do_answer(std::string_view question,
                                                          std::span<const Snippet> passages) {
  nlohmann::json body = {{"question", question}, {"passages", nlohmann::json::array()}};
  for (const auto& p : passages) body["passages"].push_back({{"id", p.id}, {"title", p.title}, {"text", p.body}});
  const auto response = transport_.call(body);
  if (!response.is_array()) throw Error(ErrorCode::kBackendUnavailable, "QA response is not a list");
  std::vector<ScoredAnswer> out;
  for (const auto& item : response) {
    out.push_back(ScoredAnswer{item.value("text", ""), item.value("confidence", 0.0), item.value("source_id", "")});
  }
  return out;
}

HttpEntailmentScorer::HttpEntailmentScorer(HttpEndpoint endpoint) : transport_(std::move(endpoint)) {}

double HttpEntailmentScorer::do_entail(std::string_view premise, std::string_view hypothesis) {
  const auto response = transport_.call({{"premise", premise}, {"hypothesis", hypothesis}});
  if (!response.is_object() || !response.contains("score") || !response["score"].is_number()) {
    throw Error(ErrorCode::kBackendUnavailable, "entailment response lacks a numeric score");
  }
  return response["score"].get<double>();
}

}  // namespace planrag::backends
