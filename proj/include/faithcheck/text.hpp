#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace faithcheck {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool starts_with_ci(std::string_view s, std::string_view prefix);
bool contains_ci(std::string_view haystack, std::string_view needle);
std::vector<std::string> split_lines(std::string_view s);

// Blocks are runs of non-blank lines separated by blank lines; each block is
// trimmed and empty blocks are dropped.
std::vector<std::string> split_blocks(std::string_view s);

bool is_word_char(char c);

// Whole-word occurrence check (case-insensitive), [A-Za-z0-9] word characters.
bool contains_word_ci(std::string_view haystack, std::string_view word);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace faithcheck
