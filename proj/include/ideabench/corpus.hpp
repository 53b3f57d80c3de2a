#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ideabench::corpus {

enum class Source { Human, Generated };

std::string to_string(Source source);
Source source_from_string(std::string_view text);

// One catalog entry: the problem statement without the "Generate 100 design
// solutions for" prefix and without terminal punctuation.
struct DesignProblem {
  int id = 0;
  std::string text;

  bool operator==(const DesignProblem&) const = default;
};

struct Solution {
  int problem_id = 0;
  Source source = Source::Generated;
  std::string variant_tag;
  std::optional<int> seq_index;  // list number emitted by the model, when present
  std::string raw_text;
  std::string normalized_text;  // numbering prefix stripped, whitespace collapsed

  bool operator==(const Solution&) const = default;
};

struct Provenance {
  std::string model_name;
  double temperature = 0.0;
  std::string endpoint_id;
  std::optional<std::string> exemplar_solution_ref;
  std::optional<std::uint64_t> rng_seed;
  std::string timestamp;  // ISO-8601 UTC; empty when unknown or replayed

  bool operator==(const Provenance&) const = default;
};

struct SolutionSet {
  int problem_id = 0;
  Source source = Source::Generated;
  std::string variant_tag;
  std::vector<Solution> solutions;
  Provenance provenance;

  // "p{problem_id}-{source}-{variant_tag}"
  std::string key() const;
};

// Stable join key for ratings: "p{problem_id}-{source}-{variant_tag}-{n}"
// where n is the solution's seq_index when present, else its 1-based position.
std::string solution_ref(const SolutionSet& set, std::size_t index);

struct RatingRecord {
  std::string solution_ref;
  std::string rater_id;
  int feasibility = 0;
  int novelty = 0;
  int usefulness = 0;

  bool operator==(const RatingRecord&) const = default;
};

// Collapses whitespace runs to single spaces and trims both ends.
std::string normalize_text(std::string_view text);

// problems.jsonl: {"id": int, "text": str}, returned sorted by id.
std::vector<DesignProblem> load_problems(const std::filesystem::path& path);

// solutions.jsonl: one solution per line, grouped into sets by
// (problem_id, source, variant_tag). Group order follows first appearance,
// solution order follows file order. Provenance is not part of this file.
std::vector<SolutionSet> load_solution_sets(const std::filesystem::path& path);
void write_solution_sets(const std::filesystem::path& path, const std::vector<SolutionSet>& sets);

// ratings.csv: header solution_ref,rater_id,feasibility,novelty,usefulness.
std::vector<RatingRecord> load_ratings(const std::filesystem::path& path);

}  // namespace ideabench::corpus
