#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace einst {

// Strips ASCII whitespace from both ends.
std::string_view trim(std::string_view text);

bool starts_with_ci(std::string_view text, std::string_view prefix);

// Splits on '\n'. A trailing newline does not yield an extra empty line.
std::vector<std::string_view> split_lines(std::string_view text);

// Text before the first occurrence of stop, or all of it.
std::string_view cut_at(std::string_view text, std::string_view stop);

}  // namespace einst
