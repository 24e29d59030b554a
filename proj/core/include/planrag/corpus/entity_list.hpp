#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "planrag/pipeline/types.hpp"

namespace planrag::corpus {

/// "Name" or "Name (disambiguator)". Throws PARSE_ERROR when the name is empty.
pipeline::EntityQuery parse_entity_line(std::string_view line,
                                        pipeline::EntityKind kind = pipeline::EntityKind::kEntityBio);

/// One entity per line, order preserved; blank lines and '#' comments are
/// skipped. Throws FILE_NOT_FOUND, or PARSE_ERROR naming the line number.
std::vector<pipeline::EntityQuery> load_entity_list(const std::filesystem::path& path,
                                                    pipeline::EntityKind kind = pipeline::EntityKind::kEntityBio);

}  // namespace planrag::corpus
