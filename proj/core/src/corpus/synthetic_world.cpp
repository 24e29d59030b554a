#include "planrag/corpus/synthetic_world.hpp"

#include <array>
#include <random>
#include <set>

#include <fmt/format.h>

#include "planrag/backends/offline.hpp"
#include "planrag/error.hpp"
#include "planrag/pipeline/prompts.hpp"
#include "planrag/textproc.hpp"

namespace planrag::corpus {
namespace {

constexpr std::array<const char*, 12> kAspectNames = {"birthplace", "education", "career",  "award",
                                                      "publication", "family", "residence", "legacy",
                                                      "mentor",    "expedition", "invention", "charity"};

constexpr std::array<const char*, 24> kSyllables = {"ka",  "lo",  "mir", "ven", "dor", "tal", "qui", "zen",
                                                    "bra", "fel", "gor", "hul", "jas", "kel", "nor", "pry",
                                                    "rux", "sol", "tev", "umb", "vax", "wil", "yor", "zim"};

constexpr std::string_view kOutlineMarker =
    "write a list of instructions for how to provide an answer to write a bio about";
constexpr std::string_view kQuestionsMarker =
    "what are the questions you would want answered to write the following paragraph ";
constexpr std::string_view kFinalMarker = "Write a fluent, clear paragraph about ";

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

class WordSource {
 public:
  explicit WordSource(std::uint64_t seed) : rng_(seed) {}

  std::string next() {
    for (;;) {
      const std::size_t syllables = 2 + rng_() % 2;
      std::string w;
      for (std::size_t i = 0; i < syllables; ++i) w += kSyllables[rng_() % kSyllables.size()];
      w[0] = static_cast<char>(w[0] - 'a' + 'A');
      if (used_.insert(w).second) return w;
    }
  }

 private:
  std::mt19937_64 rng_;
  std::set<std::string> used_;
};

std::string slugify(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (c >= 'A' && c <= 'Z') out.push_back(static_cast<char>(c - 'A' + 'a'));
    else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) out.push_back(c);
    else if (!out.empty() && out.back() != '-') out.push_back('-');
  }
  return out;
}

bool is_word_char(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'); }

// Position just past "about <name>" if it occurs with a word boundary.
std::size_t find_about(std::string_view prompt, const std::string& name, std::size_t from = 0) {
  const std::string needle = "about " + name;
  for (auto pos = prompt.find(needle, from); pos != std::string_view::npos; pos = prompt.find(needle, pos + 1)) {
    const auto end = pos + needle.size();
    if (end == prompt.size() || !is_word_char(prompt[end])) return end;
  }
  return std::string_view::npos;
}

const WorldEntity* entity_in(std::string_view prompt, const std::vector<WorldEntity>& entities) {
  for (const auto& e : entities) {
    if (find_about(prompt, e.query.rendered()) != std::string_view::npos) return &e;
  }
  return nullptr;
}

std::string join_lines(const std::vector<std::string>& lines, std::string_view sep) {
  std::string out;
  for (const auto& l : lines) {
    if (!out.empty()) out += sep;
    out += l;
  }
  return out;
}

std::optional<std::string> scripted_response(std::string_view prompt, const backends::SamplingParams& params,
                                             const std::vector<WorldEntity>& entities) {
  const WorldEntity* entity = entity_in(prompt, entities);
  if (!entity) return std::nullopt;
  const std::string name = entity->query.rendered();

  if (prompt.find(kOutlineMarker) != std::string_view::npos) {
    std::vector<std::string> lines;
    for (std::size_t j = 0; j < entity->aspects.size(); ++j) {
      lines.push_back(fmt::format("Paragraph {}: Describe the {} of {}.", j + 1, entity->aspects[j].name, name));
    }
    return join_lines(lines, "\n");
  }

  if (const auto q = prompt.find(kQuestionsMarker); q != std::string_view::npos) {
    const auto begin = q + kQuestionsMarker.size();
    const auto end = find_about(prompt, name, begin);
    const auto described = textproc::tokenize(prompt.substr(begin, end == std::string_view::npos ? 0 : end - begin));
    const std::set<std::string> words(described.begin(), described.end());

    std::vector<std::string> lines;
    for (const auto& a : entity->aspects) {
      if (words.count(a.name)) {
        lines.push_back(a.question);
        lines.push_back(a.detail_question);
      }
    }
    if (lines.empty()) {
      // No paragraph focus: ask only about what the search results show.
      for (const auto& a : entity->aspects) {
        if (backends::contains_phrase(prompt, a.fact_sentence)) lines.push_back(a.question);
      }
    }
    if (lines.empty()) lines.push_back(fmt::format("What is known about {}?", name));
    return join_lines(lines, "\n");
  }

  if (prompt.find(kFinalMarker) != std::string_view::npos) {
    const std::string key = backends::phrase_key(prompt);
    std::vector<std::string> sentences;
    for (const auto& a : entity->aspects) {
      if (key.find(backends::phrase_key(a.fact_sentence)) != std::string::npos) {
        sentences.push_back(a.fact_sentence);
        continue;
      }
      const std::string marked = a.question + "\n" + std::string(pipeline::kSkipQuestion);
      if (prompt.find(marked) != std::string_view::npos &&
          fnv1a(fmt::format("{}|{}|{}", name, a.name, params.seed)) % 2 == 0) {
        continue;
      }
      sentences.push_back(fabricated_sentence(name, a.name, params.seed));
    }
    if (sentences.empty()) sentences.push_back(fmt::format("{} is a subject profiled in regional sources.", name));
    return join_lines(sentences, " ");
  }
  return std::nullopt;
}

}  // namespace

std::string fabricated_sentence(const std::string& entity_name, const std::string& aspect, std::uint64_t seed) {
  return fmt::format("{} is associated with {} detail-{}.", entity_name, aspect, seed);
}

std::vector<pipeline::EntityQuery> SyntheticWorld::entity_queries() const {
  std::vector<pipeline::EntityQuery> out;
  for (const auto& e : entities) out.push_back(e.query);
  return out;
}

std::shared_ptr<const DocumentIndex> SyntheticWorld::index() const {
  return std::make_shared<const DocumentIndex>(documents);
}

backends::BackendSet SyntheticWorld::backends() const {
  auto generator = std::make_shared<backends::ScriptedGenerator>();
  generator->add_rule([entities = entities](std::string_view prompt, const backends::SamplingParams& params) {
    return scripted_response(prompt, params, entities);
  });

  auto qa = std::make_shared<backends::ExactMatchQA>();
  auto entail = std::make_shared<backends::FactOracleEntailment>();
  for (const auto& e : entities) {
    for (const auto& a : e.aspects) {
      qa->register_answer(a.question, a.fact_sentence, 1.0);
      qa->register_answer(a.question, e.distractor, kDistractorConfidence);
      entail->register_fact(a.fact_id, a.fact_sentence);
    }
  }
  return {generator, std::make_shared<LocalSearchEngine>(index()), qa, entail};
}

SyntheticWorld build_synthetic_world(const WorldParams& params) {
  if (params.n_entities < 1) throw Error(ErrorCode::kInvalidParams, "n_entities must be >= 1");
  if (params.generic_coverage < 1 || params.generic_coverage >= params.facts_per_entity) {
    throw Error(ErrorCode::kInvalidParams, "generic coverage g must satisfy 1 <= g < F (g=" +
                                               std::to_string(params.generic_coverage) +
                                               ", F=" + std::to_string(params.facts_per_entity) + ")");
  }

  SyntheticWorld world;
  world.params = params;
  WordSource words(params.seed);

  for (int e = 0; e < params.n_entities; ++e) {
    WorldEntity entity;
    entity.query.name = words.next() + " " + words.next();
    entity.slug = slugify(entity.query.name);
    const std::string name = entity.query.rendered();
    entity.distractor = fmt::format("{} appeared in a regional newsletter listing.", name);

    for (int j = 0; j < params.facts_per_entity; ++j) {
      Aspect a;
      a.name = static_cast<std::size_t>(j) < kAspectNames.size() ? kAspectNames[j] : fmt::format("topic{}", j + 1);
      a.fact_id = fmt::format("e{}-f{}", e + 1, j + 1);
      a.keywords = {words.next(), words.next()};
      a.fact_sentence = fmt::format("Records list the {} as {} {}.", a.name, a.keywords[0], a.keywords[1]);
      a.question = fmt::format("What is known about the {} {} {} of {}?", a.name, a.keywords[0], a.keywords[1], name);
      a.detail_question = fmt::format("What private remarks did {} make about the {}?", name, a.name);
      world.fact_registry[a.fact_id] = a.fact_sentence;
      entity.aspects.push_back(std::move(a));
    }

    std::string generic_body = name + " is a subject profiled in regional sources.";
    for (int j = 0; j < params.generic_coverage; ++j) generic_body += " " + entity.aspects[j].fact_sentence;
    generic_body += " " + entity.distractor;
    world.documents.push_back(
        {entity.slug, name, std::move(generic_body), "https://offline.example/" + entity.slug});

    for (const auto& a : entity.aspects) {
      world.documents.push_back({entity.slug + "-" + a.name,
                                 fmt::format("{} {} ({})", a.keywords[0], a.keywords[1], a.name),
                                 fmt::format("{} Further notes on {} {} are archived.", a.fact_sentence,
                                             a.keywords[0], a.keywords[1]),
                                 "https://offline.example/" + entity.slug + "/" + a.name});
    }
    world.entities.push_back(std::move(entity));
  }
  return world;
}

nlohmann::json to_json(const WorldParams& p) {
  return {{"seed", p.seed},
          {"n_entities", p.n_entities},
          {"facts_per_entity", p.facts_per_entity},
          {"generic_coverage", p.generic_coverage}};
}

WorldParams world_params_from_json(const nlohmann::json& j) {
  WorldParams p;
  p.seed = j.value("seed", p.seed);
  p.n_entities = j.value("n_entities", p.n_entities);
  p.facts_per_entity = j.value("facts_per_entity", p.facts_per_entity);
  p.generic_coverage = j.value("generic_coverage", p.generic_coverage);
  return p;
}

}  // namespace planrag::corpus
