#include "ideabench/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "ideabench/errors.hpp"

namespace ideabench::jsonl {

void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::size_t, const nlohmann::json&)>& fn) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open file: " + path.string());
  }
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.find_first_not_of(" \t") == std::string::npos) {
      continue;
    }
    nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded()) {
      throw ParseError(path.filename().string(), lineno, "malformed JSON line");
    }
    fn(lineno, doc);
  }
}

void write_lines(const std::filesystem::path& path, const std::vector<nlohmann::json>& lines) {
  std::ostringstream out;
  for (const auto& doc : lines) {
    out << doc.dump() << '\n';
  }
  write_file(path, out.str());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ConfigError("cannot write file: " + path.string());
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw ConfigError("short write: " + path.string());
  }
}

}  // namespace ideabench::jsonl
