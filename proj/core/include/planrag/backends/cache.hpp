#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "planrag/backends/interfaces.hpp"

namespace planrag::backends {

struct CacheKey {
  BackendKind backend_kind = BackendKind::kGenerate;
  std::string request_digest;  // lowercase hex SHA-256

  bool operator==(const CacheKey&) const = default;
};

/// Canonical text of a request: object keys sorted at every level, compact
/// separators, and whitespace collapsed in any string stored under "prompt".
std::string canonical_request(const nlohmann::json& request);

/// SHA-256 over the backend kind name and the canonical request.
CacheKey make_cache_key(BackendKind kind, const nlohmann::json& request);

std::string sha256_hex(std::string_view data);

/// Disk-backed response store: one file per entry named by the hex digest,
/// holding the request, the response and a write timestamp. Writes go
/// through a temporary file and an atomic rename, serialised per key.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  /// Throws CACHE_IO when an existing entry cannot be read or parsed.
  std::optional<nlohmann::json> get(const CacheKey& key) const;

  /// Throws CACHE_IO on write failure.
  void put(const CacheKey& key, const nlohmann::json& request, const nlohmann::json& response);

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path path_for(const CacheKey& key) const;
  std::mutex& lock_for(const CacheKey& key) const;

  std::filesystem::path dir_;
  mutable std::array<std::mutex, 64> locks_;
};

// Read-through decorators. A cache failure is logged and the call falls
// through to the wrapped backend; outputs are identical with or without the
// cache.

class CachingGenerator : public Generator {
 public:
  CachingGenerator(std::shared_ptr<Generator> inner, std::shared_ptr<ResponseCache> cache);

 protected:
  std::string do_generate(std::string_view prompt, const SamplingParams& params) override;

 private:
  std::shared_ptr<Generator> inner_;
  std::shared_ptr<ResponseCache> cache_;
};

class CachingSearchEngine : public SearchEngine {
 public:
  CachingSearchEngine(std::shared_ptr<SearchEngine> inner, std::shared_ptr<ResponseCache> cache);

 protected:
  std::vector<Snippet> do_search(std::string_view query, int k) override;

 private:
  std::shared_ptr<SearchEngine> inner_;
  std::shared_ptr<ResponseCache> cache_;
};

class CachingQuestionAnswerer : public QuestionAnswerer {
 public:
  CachingQuestionAnswerer(std::shared_ptr<QuestionAnswerer> inner, std::shared_ptr<ResponseCache> cache);

 protected:
  std::vector<ScoredAnswer> do_answer(std::string_view question, std::span<const Snippet> passages) override;

 private:
  std::shared_ptr<QuestionAnswerer> inner_;
  std::shared_ptr<ResponseCache> cache_;
};

class CachingEntailmentScorer : public EntailmentScorer {
 public:
  CachingEntailmentScorer(std::shared_ptr<EntailmentScorer> inner, std::shared_ptr<ResponseCache> cache);

 protected:
  double do_entail(std::string_view premise, std::string_view hypothesis) override;

 private:
  std::shared_ptr<EntailmentScorer> inner_;
  std::shared_ptr<ResponseCache> cache_;
};

/// Wraps every backend of `set` with the caching decorators.
BackendSet with_cache(const BackendSet& set, std::shared_ptr<ResponseCache> cache);

}  // namespace planrag::backends
