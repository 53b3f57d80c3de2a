#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace ideabench::jsonl {

// Parses every non-empty line of a JSON Lines file. The callback receives the
// 1-based line number and the parsed object. Parse failures throw ParseError
// carrying the file name and line number.
void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::size_t, const nlohmann::json&)>& fn);

// Writes one compact JSON document per line, LF endings, UTF-8.
void write_lines(const std::filesystem::path& path, const std::vector<nlohmann::json>& lines);

// Reads a whole file into memory. Throws ConfigError when the file is missing.
std::string read_file(const std::filesystem::path& path);

// Writes a whole file, creating parent directories as needed.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace ideabench::jsonl
