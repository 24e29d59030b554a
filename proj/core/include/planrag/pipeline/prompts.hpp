#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "planrag/pipeline/types.hpp"

namespace planrag::pipeline {

enum class TemplateId { kDirect, kSearchGen, kOutline, kQuestions, kQaGen };

/// Text that follows an unanswerable question in the final prompt.
inline constexpr std::string_view kSkipQuestion = "Not enough information. Skip this question.";

std::string_view template_name(TemplateId id);
/// "DIRECT", "SEARCH_GEN", ...; throws UNKNOWN_TEMPLATE otherwise.
TemplateId parse_template_id(std::string_view name);

/// Values for the named placeholders {entity}, {snippets}, {paragraph} and
/// {qa_pairs}. Unset optionals are unbound; an empty snippet or QA list is
/// also treated as unbound.
struct PromptBindings {
  std::optional<std::string> entity;
  std::optional<std::vector<Snippet>> snippets;
  std::optional<std::string> paragraph;
  std::optional<std::vector<QAItem>> qa_pairs;
};

/// Repeated "Snippet Title: ...\nSnippet Text: ...\n" blocks in the given order.
std::string render_snippets(const std::vector<Snippet>& snippets);

/// One line per item: "question answer1 answer2"; unanswerable items render
/// as the question, a newline and kSkipQuestion.
std::string render_qa_pairs(const std::vector<QAItem>& items);

class PromptLibrary {
 public:
  /// The built-in templates.
  PromptLibrary();

  /// Built-ins overridden by any of direct.txt, search_gen.txt, outline.txt,
  /// questions.txt, qa_gen.txt found in `dir` (one trailing newline is
  /// dropped). Throws FILE_NOT_FOUND if `dir` does not exist.
  static PromptLibrary from_directory(const std::filesystem::path& dir);

  const std::string& source(TemplateId id) const { return templates_[static_cast<std::size_t>(id)]; }
  void set(TemplateId id, std::string text) { templates_[static_cast<std::size_t>(id)] = std::move(text); }

  /// Throws MISSING_BINDING naming the first unbound placeholder.
  std::string render(TemplateId id, const PromptBindings& bindings) const;

 private:
  std::array<std::string, 5> templates_;
};

std::string render_prompt(TemplateId id, const PromptBindings& bindings);

}  // namespace planrag::pipeline
