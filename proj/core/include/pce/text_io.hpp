#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pce::text {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);
void append_double(std::string& out, double value);

/// Strict parse of a whole token; throws ParseError naming line/column.
double parse_double(std::string_view token, std::size_t line, std::size_t column);
long long parse_integer(std::string_view token, std::size_t line, std::size_t column);

struct Token {
  std::string_view text;
  std::size_t column;  ///< 1-based
};

/// Splits on spaces and tabs.
std::vector<Token> split_whitespace(std::string_view line);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomically(const std::filesystem::path& path, const std::string& content);

}  // namespace pce::text
