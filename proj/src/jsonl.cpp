#include "einst/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "einst/error.hpp"

namespace einst::jsonl {

namespace fs = std::filesystem;

void for_each_record(const fs::path& path,
                     const std::function<void(const nlohmann::json&, std::size_t)>& visit) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": invalid JSON: " + e.what());
    }
    if (!record.is_object()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected a JSON object");
    }
    visit(record, line_no);
  }
}

void write_records(const fs::path& path, const std::vector<nlohmann::json>& records) {
  std::string content;
  for (const auto& r : records) {
    content += r.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    content += '\n';
  }
  write_file(path, content);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace einst::jsonl
