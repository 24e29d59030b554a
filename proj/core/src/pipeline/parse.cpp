#include "planrag/pipeline/parse.hpp"

#include <regex>
#include <sstream>

#include "planrag/error.hpp"
#include "planrag/textproc.hpp"

namespace planrag::pipeline {
namespace {

std::vector<std::string> lines_of(std::string_view raw) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(raw)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace

Outline parse_outline(std::string_view raw) {
  static const std::regex kHeader(
      R"(^\s*(?:[-*+]\s+|\d+[.)]\s+|#+\s*)?(?:\*\*|__)?\s*paragraph\s+(\d+)\s*(?:\*\*|__)?\s*:\s*(?:\*\*|__)?\s*(.*)$)",
      std::regex::icase);

  Outline outline;
  bool open = false;
  for (const auto& line : lines_of(raw)) {
    std::smatch m;
    if (std::regex_match(line, m, kHeader)) {
      outline.paragraphs.push_back({0, textproc::trim(m[2].str())});
      open = true;
      continue;
    }
    if (!open) continue;
    const std::string text = textproc::trim(line);
    if (text.empty()) continue;
    auto& instructions = outline.paragraphs.back().instructions;
    if (!instructions.empty()) instructions += "\n";
    instructions += text;
  }

  std::erase_if(outline.paragraphs, [](const OutlineParagraph& p) { return p.instructions.empty(); });
  if (outline.paragraphs.empty()) throw Error(ErrorCode::kNoParagraphs, "no 'Paragraph <n>:' header found");
  for (std::size_t i = 0; i < outline.paragraphs.size(); ++i) outline.paragraphs[i].index = static_cast<int>(i) + 1;
  return outline;
}

std::vector<Question> parse_questions(std::string_view raw, int paragraph_index) {
  static const std::regex kMarker(R"(^(?:[-*+]\s*|\(?\d+[.):]\s*|[Qq]\d+[.):]\s*)+)");

  std::vector<Question> out;
  for (const auto& line : lines_of(raw)) {
    const std::string trimmed = textproc::trim(line);
    if (trimmed.empty() || textproc::tokenize(trimmed).size() < 3) continue;
    std::string text = textproc::trim(std::regex_replace(trimmed, kMarker, "", std::regex_constants::format_first_only));
    if (text.empty()) continue;
    if (text.back() != '?') text.push_back('?');
    out.push_back({paragraph_index, std::move(text)});
  }
  return out;
}

std::string normalize_query(std::string_view text) {
  std::string out = textproc::collapse_whitespace(text);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace planrag::pipeline
