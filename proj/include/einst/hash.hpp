#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace einst {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace einst
