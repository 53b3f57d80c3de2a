#include "ideabench/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ideabench/errors.hpp"
#include "ideabench/jsonl.hpp"

#include <json.hpp>

namespace ideabench::corpus {

using nlohmann::json;

std::string to_string(Source source) {
  return source == Source::Human ? "human" : "generated";
}

Source source_from_string(std::string_view text) {
  if (text == "human") return Source::Human;
  if (text == "generated") return Source::Generated;
  throw ValidationError("unknown source: " + std::string(text));
}

std::string SolutionSet::key() const {
  return "p" + std::to_string(problem_id) + "-" + to_string(source) + "-" + variant_tag;
}

std::string solution_ref(const SolutionSet& set, std::size_t index) {
  if (index >= set.solutions.size()) {
    throw DomainError("solution index out of range for set " + set.key());
  }
  const Solution& s = set.solutions[index];
  int n = s.seq_index ? *s.seq_index : static_cast<int>(index) + 1;
  return set.key() + "-" + std::to_string(n);
}

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_space = true;  // leading whitespace gets dropped
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      in_space = true;
    } else {
      if (in_space && !out.empty()) out.push_back(' ');
      in_space = false;
      out.push_back(static_cast<char>(c));
    }
  }
  return out;
}

std::vector<DesignProblem> load_problems(const std::filesystem::path& path) {
  std::vector<DesignProblem> problems;
  jsonl::for_each_line(path, [&](std::size_t lineno, const json& j) {
    DesignProblem p;
    if (!j.contains("id") || !j["id"].is_number_integer() || !j.contains("text") ||
        !j["text"].is_string()) {
      throw ParseError(path.string(), lineno, "problem needs integer id and string text");
    }
    p.id = j["id"].get<int>();
    p.text = j["text"].get<std::string>();
    if (p.id <= 0) throw ValidationError("problem id must be positive, got " + std::to_string(p.id));
    if (normalize_text(p.text).empty()) {
      throw ValidationError("problem " + std::to_string(p.id) + " has empty text");
    }
    char last = p.text.back();
    if (last == '.' || last == '!' || last == '?') {
      throw ValidationError("problem " + std::to_string(p.id) +
                            " has terminal punctuation: " + p.text);
    }
    problems.push_back(std::move(p));
  });
  std::sort(problems.begin(), problems.end(),
            [](const DesignProblem& a, const DesignProblem& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < problems.size(); ++i) {
    if (problems[i].id == problems[i - 1].id) {
      throw ValidationError("duplicate problem id " + std::to_string(problems[i].id));
    }
  }
  return problems;
}

namespace {

Solution solution_from_json(const std::string& file, std::size_t lineno, const json& j) {
  for (const char* key : {"problem_id", "source", "variant_tag", "raw_text", "normalized_text"}) {
    if (!j.contains(key)) {
      throw ParseError(file, lineno, std::string("solution missing field: ") + key);
    }
  }
  Solution s;
  s.problem_id = j["problem_id"].get<int>();
  s.source = source_from_string(j["source"].get<std::string>());
  s.variant_tag = j["variant_tag"].get<std::string>();
  if (j.contains("seq_index") && !j["seq_index"].is_null()) {
    s.seq_index = j["seq_index"].get<int>();
  }
  s.raw_text = j["raw_text"].get<std::string>();
  s.normalized_text = j["normalized_text"].get<std::string>();
  if (s.normalized_text.empty()) {
    throw ValidationError(file + ":" + std::to_string(lineno) +
                          ": solution has empty normalized_text");
  }
  return s;
}

json solution_to_json(const Solution& s) {
  json j;
  j["problem_id"] = s.problem_id;
  j["source"] = to_string(s.source);
  j["variant_tag"] = s.variant_tag;
  if (s.seq_index) {
    j["seq_index"] = *s.seq_index;
  } else {
    j["seq_index"] = nullptr;
  }
  j["raw_text"] = s.raw_text;
  j["normalized_text"] = s.normalized_text;
  return j;
}

}  // namespace

std::vector<SolutionSet> load_solution_sets(const std::filesystem::path& path) {
  std::vector<SolutionSet> sets;
  std::map<std::string, std::size_t> index_by_key;
  jsonl::for_each_line(path, [&](std::size_t lineno, const json& j) {
    Solution s = solution_from_json(path.string(), lineno, j);
    SolutionSet probe;
    probe.problem_id = s.problem_id;
    probe.source = s.source;
    probe.variant_tag = s.variant_tag;
    std::string key = probe.key();
    auto it = index_by_key.find(key);
    if (it == index_by_key.end()) {
      it = index_by_key.emplace(key, sets.size()).first;
      sets.push_back(std::move(probe));
    }
    sets[it->second].solutions.push_back(std::move(s));
  });
  return sets;
}

void write_solution_sets(const std::filesystem::path& path,
                         const std::vector<SolutionSet>& sets) {
  std::vector<json> lines;
  for (const SolutionSet& set : sets) {
    for (const Solution& s : set.solutions) {
      lines.push_back(solution_to_json(s));
    }
  }
  jsonl::write_lines(path, lines);
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
  // The ratings file is plain CSV without quoting; refs and rater ids never
  // contain commas.
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

int parse_rating_value(const std::string& file, std::size_t lineno, const std::string& text) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(text, &pos);
  } catch (const std::exception&) {
    throw ParseError(file, lineno, "rating is not an integer: " + text);
  }
  if (pos != text.size()) throw ParseError(file, lineno, "rating is not an integer: " + text);
  if (v < 0 || v > 2) {
    throw ValidationError(file + ":" + std::to_string(lineno) +
                          ": rating out of 0-2 range: " + text);
  }
  return v;
}

}  // namespace

std::vector<RatingRecord> load_ratings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  std::vector<RatingRecord> records;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (line != "solution_ref,rater_id,feasibility,novelty,usefulness") {
        throw ParseError(path.string(), lineno, "unexpected ratings header: " + line);
      }
      continue;
    }
    std::vector<std::string> fields = split_csv_row(line);
    if (fields.size() != 5) {
      throw ParseError(path.string(), lineno,
                       "expected 5 fields, got " + std::to_string(fields.size()));
    }
    RatingRecord r;
    r.solution_ref = fields[0];
    r.rater_id = fields[1];
    if (r.solution_ref.empty() || r.rater_id.empty()) {
      throw ParseError(path.string(), lineno, "empty solution_ref or rater_id");
    }
    r.feasibility = parse_rating_value(path.string(), lineno, fields[2]);
    r.novelty = parse_rating_value(path.string(), lineno, fields[3]);
    r.usefulness = parse_rating_value(path.string(), lineno, fields[4]);
    if (!seen.insert(r.solution_ref + "\x1f" + r.rater_id).second) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                            ": duplicate rating for (" + r.solution_ref + ", " + r.rater_id + ")");
    }
    records.push_back(std::move(r));
  }
  if (!header_seen) throw ParseError(path.string(), 1, "ratings file is empty");
  return records;
}

}  // namespace ideabench::corpus
