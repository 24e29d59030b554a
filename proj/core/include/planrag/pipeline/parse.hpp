#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "planrag/pipeline/types.hpp"

namespace planrag::pipeline {

/// Reads "Paragraph <n>: ..." headers (case-insensitive, optionally behind a
/// list marker or markdown emphasis). Lines after a header, bullets
/// included, extend that paragraph until the next header. Paragraphs are
/// renumbered 1..n in order of appearance; ones with no text are dropped.
/// Throws NO_PARAGRAPHS when nothing usable is found.
Outline parse_outline(std::string_view raw);

/// One question per line, list markers and numbering removed, "?" appended
/// when missing. Blank lines and lines with fewer than three tokens
/// (counted before marker removal) are dropped.
std::vector<Question> parse_questions(std::string_view raw, int paragraph_index);

/// Key used to deduplicate search queries: lowercase, trimmed, internal
/// whitespace collapsed.
std::string normalize_query(std::string_view text);

}  // namespace planrag::pipeline
