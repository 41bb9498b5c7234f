#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cwlab::io {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

double parse_double(std::string_view s);

/// Writes to a sibling temporary file and renames it over the target, so a
/// failed write never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Comma-separated fields of one line; no quoting support.
std::vector<std::string_view> split_csv_line(std::string_view line);

/// Lines without trailing '\r'; the final empty line is dropped.
std::vector<std::string_view> split_lines(std::string_view text);

}  // namespace cwlab::io
