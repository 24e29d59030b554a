#include "planrag/pipeline/prompts.hpp"

#include <fstream>
#include <sstream>

#include "planrag/error.hpp"

namespace planrag::pipeline {
namespace {

constexpr std::string_view kDirect = "Write a fluent, clear paragraph about {entity}.";

constexpr std::string_view kSearchGen =
    "Search Results:\n"
    "{snippets}"
    "Write a fluent, clear paragraph about {entity} using only facts in the given text.";

constexpr std::string_view kOutline =
    "Search Results:\n"
    "{snippets}"
    "Given the above search results, write a list of instructions for how to provide an answer to write a bio "
    "about {entity} in the format:\n"
    "\n"
    "Paragraph 1: Instructions for paragraph 1\n"
    "\n"
    "Paragraph 2: Instructions for paragraph 2\n"
    "\n"
    "...\n"
    "\n"
    "Paragraph N: Instructions for paragraph N\n"
    "\n"
    "The outline should allow for each paragraph to be written independently in parallel. The collection of "
    "paragraphs should form a bio for {entity}. For each paragraph, write a descriptive set of instructions for "
    "the content that should be included and summarize the things that should not be included because they are "
    "written in other paragraphs. All facts, dates, and years must be supported in the given search results.";

constexpr std::string_view kQuestions =
    "Search Results:\n"
    "{snippets}"
    "\n"
    "Given the above search results, what are the questions you would want answered to write the following "
    "paragraph {paragraph} about {entity}?\n"
    "Write just the questions separated by a new line. Each question should be understandable independently.";

constexpr std::string_view kQaGen =
    "Consider the following question-answer pairs:\n"
    "{qa_pairs}"
    "Write a fluent, clear paragraph about {entity} using only facts in the above.";

constexpr std::array<TemplateId, 5> kAllTemplates = {TemplateId::kDirect, TemplateId::kSearchGen,
                                                     TemplateId::kOutline, TemplateId::kQuestions,
                                                     TemplateId::kQaGen};

std::string file_name(TemplateId id) {
  std::string name(template_name(id));
  for (auto& c : name) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return name + ".txt";
}

bool is_placeholder_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

}  // namespace

std::string_view template_name(TemplateId id) {
  switch (id) {
    case TemplateId::kDirect: return "DIRECT";
    case TemplateId::kSearchGen: return "SEARCH_GEN";
    case TemplateId::kOutline: return "OUTLINE";
    case TemplateId::kQuestions: return "QUESTIONS";
    case TemplateId::kQaGen: return "QA_GEN";
  }
  return "UNKNOWN";
}

TemplateId parse_template_id(std::string_view name) {
  for (auto id : kAllTemplates) {
    if (template_name(id) == name) return id;
  }
  throw Error(ErrorCode::kUnknownTemplate, "no template named '" + std::string(name) + "'");
}

std::string render_snippets(const std::vector<Snippet>& snippets) {
  std::string out;
  for (const auto& s : snippets) {
    out += "Snippet Title: " + s.title + "\n";
    out += "Snippet Text: " + s.body + "\n";
  }
  return out;
}

std::string render_qa_pairs(const std::vector<QAItem>& items) {
  std::string out;
  for (const auto& item : items) {
    out += item.question.text;
    if (item.unanswerable) {
      out += "\n";
      out += kSkipQuestion;
    } else {
      for (const auto& a : item.answers) out += " " + a.text;
    }
    out += "\n";
  }
  return out;
}

PromptLibrary::PromptLibrary()
    : templates_{std::string(kDirect), std::string(kSearchGen), std::string(kOutline), std::string(kQuestions),
                 std::string(kQaGen)} {}

PromptLibrary PromptLibrary::from_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kFileNotFound, "template directory " + dir.string() + " does not exist");
  }
  PromptLibrary lib;
  for (auto id : kAllTemplates) {
    const auto path = dir / file_name(id);
    std::ifstream in(path, std::ios::binary);
    if (!in) continue;
    std::ostringstream text;
    text << in.rdbuf();
    std::string s = text.str();
    if (!s.empty() && s.back() == '\n') s.pop_back();
    lib.set(id, std::move(s));
  }
  return lib;
}

std::string PromptLibrary::render(TemplateId id, const PromptBindings& bindings) const {
  const std::string& tmpl = source(id);
  std::string out;
  out.reserve(tmpl.size() * 2);
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    if (tmpl[pos] == '{') {
      std::size_t end = pos + 1;
      while (end < tmpl.size() && is_placeholder_char(tmpl[end])) ++end;
      if (end < tmpl.size() && tmpl[end] == '}' && end > pos + 1) {
        const std::string_view name(tmpl.data() + pos + 1, end - pos - 1);
        const auto missing = [&] {
          return Error(ErrorCode::kMissingBinding, std::string(template_name(id)) + " requires {" +
                                                       std::string(name) + "}");
        };
        if (name == "entity") {
          if (!bindings.entity) throw missing();
          out += *bindings.entity;
        } else if (name == "paragraph") {
          if (!bindings.paragraph) throw missing();
          out += *bindings.paragraph;
        } else if (name == "snippets") {
          if (!bindings.snippets || bindings.snippets->empty()) throw missing();
          out += render_snippets(*bindings.snippets);
        } else if (name == "qa_pairs") {
          if (!bindings.qa_pairs || bindings.qa_pairs->empty()) throw missing();
          out += render_qa_pairs(*bindings.qa_pairs);
        } else {
          throw missing();
        }
        pos = end + 1;
        continue;
      }
    }
    out.push_back(tmpl[pos++]);
  }
  return out;
}

std::string render_prompt(TemplateId id, const PromptBindings& bindings) {
  static const PromptLibrary kDefaults;
  return kDefaults.render(id, bindings);
}

}  // namespace planrag::pipeline
