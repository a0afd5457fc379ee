#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace patsim::detail {

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Throws MissingArtifactError when the file cannot be read.
std::string read_file(const std::filesystem::path& path);

}  // namespace patsim::detail
