#include "planrag/corpus/entity_list.hpp"

#include <fstream>

#include "planrag/error.hpp"
#include "planrag/textproc.hpp"

namespace planrag::corpus {

pipeline::EntityQuery parse_entity_line(std::string_view line, pipeline::EntityKind kind) {
  std::string text = textproc::trim(line);
  pipeline::EntityQuery q;
  q.kind = kind;
  if (!text.empty() && text.back() == ')') {
    const auto open = text.rfind('(');
    if (open == std::string::npos) throw Error(ErrorCode::kParseError, "unbalanced parenthesis in '" + text + "'");
    std::string dis = textproc::trim(std::string_view(text).substr(open + 1, text.size() - open - 2));
    if (!dis.empty()) q.disambiguator = std::move(dis);
    text = textproc::trim(std::string_view(text).substr(0, open));
  }
  if (text.empty()) throw Error(ErrorCode::kParseError, "entity name is empty");
  q.name = std::move(text);
  return q;
}

std::vector<pipeline::EntityQuery> load_entity_list(const std::filesystem::path& path, pipeline::EntityKind kind) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open entity list " + path.string());
  std::vector<pipeline::EntityQuery> out;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    const std::string trimmed = textproc::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    try {
      out.push_back(parse_entity_line(trimmed, kind));
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace planrag::corpus
