#include "planrag/backends/cache.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "planrag/error.hpp"
#include "planrag/textproc.hpp"

namespace planrag::backends {
namespace {

nlohmann::json normalized(const nlohmann::json& value) {
  if (value.is_object()) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [k, v] : value.items()) {
      out[k] = (k == "prompt" && v.is_string()) ? nlohmann::json(textproc::collapse_whitespace(v.get<std::string>()))
                                                : normalized(v);
    }
    return out;
  }
  if (value.is_array()) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& v : value) out.push_back(normalized(v));
    return out;
  }
  return value;
}

std::string now_utc() {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(
                                                  std::chrono::system_clock::now())));
}

// Looks the request up, otherwise computes it with `live` and stores the
// result. Cache errors never change the returned value.
template <typename Live>
nlohmann::json read_through(ResponseCache& cache, BackendKind kind, const nlohmann::json& request, Live&& live) {
  const CacheKey key = make_cache_key(kind, request);
  try {
    if (auto hit = cache.get(key)) return *hit;
  } catch (const Error& e) {
    spdlog::warn("cache read failed, calling backend: {}", e.what());
  }
  nlohmann::json response = live();
  try {
    cache.put(key, request, response);
  } catch (const Error& e) {
    spdlog::warn("cache write failed: {}", e.what());
  }
  return response;
}

}  // namespace

std::string canonical_request(const nlohmann::json& request) { return normalized(request).dump(); }

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kCacheIo, "SHA-256 computation failed");
  }
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

CacheKey make_cache_key(BackendKind kind, const nlohmann::json& request) {
  std::string material(backend_kind_name(kind));
  material.push_back('\n');
  material += canonical_request(request);
  return CacheKey{kind, sha256_hex(material)};
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::kCacheIo, "cannot create cache directory " + dir_.string() + ": " + ec.message());
}

std::filesystem::path ResponseCache::path_for(const CacheKey& key) const { return dir_ / key.request_digest; }

std::mutex& ResponseCache::lock_for(const CacheKey& key) const {
  return locks_[std::hash<std::string>{}(key.request_digest) % locks_.size()];
}

std::optional<nlohmann::json> ResponseCache::get(const CacheKey& key) const {
  const auto path = path_for(key);
  std::lock_guard lock(lock_for(key));
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    const auto entry = nlohmann::json::parse(in);
    if (entry.value("backend_kind", "") != backend_kind_name(key.backend_kind)) return std::nullopt;
    return std::optional<nlohmann::json>(std::in_place, entry.at("response"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCacheIo, "corrupt cache entry " + path.string() + ": " + e.what());
  }
}

void ResponseCache::put(const CacheKey& key, const nlohmann::json& request, const nlohmann::json& response) {
  const nlohmann::json entry = {{"backend_kind", backend_kind_name(key.backend_kind)},
                                {"request", request},
                                {"response", response},
                                {"timestamp", now_utc()}};
  const auto path = path_for(key);
  std::ostringstream tmp_name;
  tmp_name << key.request_digest << ".tmp." << std::this_thread::get_id();
  const auto tmp = dir_ / tmp_name.str();

  std::lock_guard lock(lock_for(key));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kCacheIo, "cannot write " + tmp.string());
    out << entry.dump();
    if (!out) throw Error(ErrorCode::kCacheIo, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kCacheIo, "cannot publish cache entry " + path.string());
  }
}

CachingGenerator::CachingGenerator(std::shared_ptr<Generator> inner, std::shared_ptr<ResponseCache> cache)
    : Generator(inner->max_prompt_chars()), inner_(std::move(inner)), cache_(std::move(cache)) {}

std::string CachingGenerator::do_generate(std::string_view prompt, const SamplingParams& params) {
  nlohmann::json request = params;
  request["prompt"] = prompt;
  const auto response = read_through(*cache_, BackendKind::kGenerate, request, [&] {
    return nlohmann::json{{"text", inner_->generate(prompt, params)}};
  });
  return response.at("text").get<std::string>();
}

CachingSearchEngine::CachingSearchEngine(std::shared_ptr<SearchEngine> inner, std::shared_ptr<ResponseCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

std::vector<Snippet> CachingSearchEngine::do_search(std::string_view query, int k) {
  const nlohmann::json request = {{"query", query}, {"k", k}};
  const auto response = read_through(*cache_, BackendKind::kSearch, request,
                                     [&] { return nlohmann::json(inner_->search(query, k)); });
  return response.get<std::vector<Snippet>>();
}

CachingQuestionAnswerer::CachingQuestionAnswerer(std::shared_ptr<QuestionAnswerer> inner,
                                                 std::shared_ptr<ResponseCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

std::vector<ScoredAnswer> CachingQuestionAnswerer::do_answer(std::string_view question,
                                                             std::span<const Snippet> passages) {
  nlohmann::json request = {{"question", question}, {"passages", nlohmann::json::array()}};
  for (const auto& p : passages) request["passages"].push_back(p);
  const auto response = read_through(*cache_, BackendKind::kQa, request,
                                     [&] { return nlohmann::json(inner_->answer(question, passages)); });
  return response.get<std::vector<ScoredAnswer>>();
}

CachingEntailmentScorer::CachingEntailmentScorer(std::shared_ptr<EntailmentScorer> inner,
                                                 std::shared_ptr<ResponseCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

double CachingEntailmentScorer::do_entail(std::string_view premise, std::string_view hypothesis) {
  const nlohmann::json request = {{"premise", premise}, {"hypothesis", hypothesis}};
  const auto response = read_through(*cache_, BackendKind::kEntail, request, [&] {
    return nlohmann::json{{"score", inner_->entail(premise, hypothesis)}};
  });
  return response.at("score").get<double>();
}

BackendSet with_cache(const BackendSet& set, std::shared_ptr<ResponseCache> cache) {
  BackendSet out;
  if (set.generator) out.generator = std::make_shared<CachingGenerator>(set.generator, cache);
  if (set.search) out.search = std::make_shared<CachingSearchEngine>(set.search, cache);
  if (set.qa) out.qa = std::make_shared<CachingQuestionAnswerer>(set.qa, cache);
  if (set.entail) out.entail = std::make_shared<CachingEntailmentScorer>(set.entail, cache);
  return out;
}

}  // namespace planrag::backends
