#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace planrag::backends {

struct SamplingParams {
  double temperature = 0.7;
  double top_p = 0.9;
  std::uint64_t seed = 0;
  int max_output_tokens = 512;

  /// Throws INVALID_ARGUMENT unless temperature >= 0, top_p in (0,1] and
  /// max_output_tokens >= 1.
  void validate() const;

  bool operator==(const SamplingParams&) const = default;
};

/// One retrieved evidence passage. `rank` is 1-based within the search call
/// that produced it.
struct Snippet {
  std::string id;
  std::string title;
  std::string body;
  std::string source_url;
  int rank = 1;
  std::string origin_query;

  /// Title and body as one evidence passage.
  std::string passage() const;

  bool operator==(const Snippet&) const = default;
};

struct ScoredAnswer {
  std::string text;
  double confidence = 0.0;
  std::string source_snippet_id;

  bool operator==(const ScoredAnswer&) const = default;
};

enum class BackendKind { kGenerate, kSearch, kQa, kEntail };

std::string_view backend_kind_name(BackendKind kind);

void to_json(nlohmann::json& j, const SamplingParams& p);
void from_json(const nlohmann::json& j, SamplingParams& p);
void to_json(nlohmann::json& j, const Snippet& s);
void from_json(const nlohmann::json& j, Snippet& s);
void to_json(nlohmann::json& j, const ScoredAnswer& a);
void from_json(const nlohmann::json& j, ScoredAnswer& a);

}  // namespace planrag::backends
