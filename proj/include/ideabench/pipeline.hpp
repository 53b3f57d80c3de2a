#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ideabench/genclient.hpp"
#include "ideabench/promptgen.hpp"

namespace ideabench::pipeline {

struct RunConfig {
  // inputs and output directory
  std::string problems_path;
  std::string human_solutions_path;
  std::string ratings_path;  // optional; stats are skipped without it
  std::string out_dir = "out";

  // run shape
  std::uint64_t seed = 42;
  std::vector<int> problem_ids;  // empty = every problem with a human baseline
  bool run_base = true;
  std::vector<promptgen::Adjective> adjectives = {
      promptgen::Adjective::Unique, promptgen::Adjective::Novel, promptgen::Adjective::Diverse};
  bool run_fewshot = true;

  // generation
  std::string gen_mode = "http";  // "http" or "fixtures"
  std::string gen_fixtures_path;  // completions keyed by (problem_id, variant_tag)
  genclient::GenerationConfig gen;

  // embedding
  std::string provider = "stub";  // stub | file | http
  int embed_dim = 384;
  std::string embed_file;
  std::string embed_url;
  int embed_timeout_ms = 30000;

  // Collects every problem into one error instead of stopping at the first.
  void validate() const;
};

// key = value lines, '#' comments. Unknown keys are an error.
RunConfig load_config(const std::filesystem::path& path);

// Applies one "key=value" pair on top of a loaded config (CLI precedence).
void apply_override(RunConfig& config, const std::string& key, const std::string& value);

// Number of few-shot runs per problem; fixed by the sampling protocol.
inline constexpr int kFewShotRuns = 5;

void cmd_prompts(const RunConfig& config);
void cmd_generate(const RunConfig& config);
void cmd_parse(const RunConfig& config);
void cmd_embed(const RunConfig& config);
void cmd_metrics(const RunConfig& config);
void cmd_stats(const RunConfig& config);
void cmd_report(const RunConfig& config);
void cmd_run_all(const RunConfig& config);

}  // namespace ideabench::pipeline
