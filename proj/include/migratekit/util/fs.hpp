#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace migratekit::fs {

std::string read_file(const std::filesystem::path& path);

/// Writes through a sibling temp file and renames it over `path`, so readers
/// only ever observe a complete file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Like write_file_atomic but skips the write when content is unchanged.
void write_if_changed(const std::filesystem::path& path, std::string_view content);

}  // namespace migratekit::fs
