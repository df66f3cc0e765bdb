#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace migratekit::text {

/// Splits on '\n'. A trailing newline does not produce an empty last line.
std::vector<std::string> split_lines(std::string_view text);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string_view trim(std::string_view s);
std::string_view rtrim(std::string_view s);

std::string to_lower(std::string_view s);

bool is_blank(std::string_view line);

/// Lines that are non-blank once trailing whitespace is stripped.
int count_nonblank_lines(std::string_view text);

/// Number of physical lines (1 for text without newlines, 0 for empty).
int count_lines(std::string_view text);

/// Body of the first ``` fenced block, or the whole text when no fence exists.
std::string extract_code_block(std::string_view completion);

/// Collapses every whitespace run to one space; used to compare item text
/// modulo formatting.
std::string normalize_ws(std::string_view s);

/// Line (1-based) containing byte offset `offset`.
int line_of_offset(std::string_view text, std::size_t offset);

bool is_identifier(std::string_view s);

/// Filesystem-safe stem for a function id like "dir/file.c::name".
std::string file_stem_for_id(std::string_view id);

}  // namespace migratekit::text
