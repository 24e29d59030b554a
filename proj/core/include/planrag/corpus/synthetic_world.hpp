#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "planrag/backends/interfaces.hpp"
#include "planrag/corpus/document_index.hpp"
#include "planrag/pipeline/types.hpp"

namespace planrag::corpus {

struct WorldParams {
  std::uint64_t seed = 7;
  int n_entities = 8;
  int facts_per_entity = 6;  // F
  int generic_coverage = 2;  // g: facts present in the entity's generic document

  bool operator==(const WorldParams&) const = default;
};

struct Aspect {
  std::string name;                   // e.g. "birthplace"
  std::string fact_id;                // e.g. "e3-f2"
  std::string fact_sentence;          // never mentions the entity name
  std::vector<std::string> keywords;  // unique to this (entity, aspect)
  std::string question;               // answerable: registered with the QA oracle
  std::string detail_question;        // never answerable
};

struct WorldEntity {
  pipeline::EntityQuery query;
  std::string slug;
  std::vector<Aspect> aspects;
  std::string distractor;  // low-confidence QA candidate planted in the generic doc
};

/// Planted-fact testbed. Each entity has one generic document, retrievable
/// by its name, that carries the first g fact sentences, plus one document
/// per aspect that is reachable only through the aspect keywords.
struct SyntheticWorld {
  WorldParams params;
  std::vector<WorldEntity> entities;
  std::vector<Document> documents;
  std::map<std::string, std::string> fact_registry;  // fact id -> sentence

  std::vector<pipeline::EntityQuery> entity_queries() const;
  std::shared_ptr<const DocumentIndex> index() const;

  /// Fresh offline backends for this world (new call counters each time):
  /// local search over the documents, a scripted generator, exact-match QA
  /// and the planted-fact entailment oracle.
  backends::BackendSet backends() const;
};

/// QA confidence given to each entity's distractor candidate.
inline constexpr double kDistractorConfidence = 0.3;

/// Deterministic in `params`. Throws INVALID_PARAMS unless
/// n_entities >= 1 and 1 <= g < F.
///
/// Scripted generator behaviour, keyed on the prompt:
///   outline   -> one "Paragraph j: Describe the <aspect> of <name>." per aspect
///   questions -> for paragraphs naming an aspect, its answerable and detail
///                questions; otherwise (no outline) answerable questions for
///                the aspects whose facts are visible in the prompt
///   final     -> one sentence per aspect: the fact sentence when the prompt
///                contains it; a fabricated sentence otherwise, except that
///                an aspect whose question is marked unanswerable is skipped
///                on roughly half of (aspect, seed) pairs
SyntheticWorld build_synthetic_world(const WorldParams& params);

/// "{name} is associated with {aspect} detail-{seed}."
std::string fabricated_sentence(const std::string& entity_name, const std::string& aspect, std::uint64_t seed);

nlohmann::json to_json(const WorldParams& p);
WorldParams world_params_from_json(const nlohmann::json& j);

}  // namespace planrag::corpus
