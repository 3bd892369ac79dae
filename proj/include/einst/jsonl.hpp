#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace einst::jsonl {

// Calls visit(record, line_number) for every non-blank line. Line numbers
// are 1-based. Throws IoError if the file cannot be opened and DataError on
// a line that is not a JSON object.
void for_each_record(const std::filesystem::path& path,
                     const std::function<void(const nlohmann::json&, std::size_t)>& visit);

// Writes one compact JSON document per line, '\n' terminated, creating
// parent directories. The write goes through a temporary file that is
// renamed into place.
void write_records(const std::filesystem::path& path,
                   const std::vector<nlohmann::json>& records);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace einst::jsonl
