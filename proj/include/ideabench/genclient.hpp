#pragma once

#include <string>
#include <vector>

#include "ideabench/corpus.hpp"
#include "ideabench/promptgen.hpp"

namespace ideabench::genclient {

struct GenerationConfig {
  std::string endpoint_url;
  std::string model_name = "davinci-003";  // historical default; retired, substitutable
  double temperature = 0.9;
  double top_p = 1.0;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;
  int max_tokens = 3000;
  std::string api_key_env = "IDEABENCH_API_KEY";
  int timeout_ms = 60000;
  int max_retries = 3;
  int retry_backoff_ms = 250;  // doubled per attempt
  int concurrency = 4;

  void validate() const;
};

struct GenerationRecord {
  promptgen::PromptSpec prompt;
  std::string raw_completion;  // byte-exact, no trimming
  GenerationConfig config_snapshot;
  std::string received_at;  // ISO-8601 UTC
};

// One completion per call. Retries 429/5xx/transport failures with
// exponential backoff; other non-2xx statuses fail immediately.
GenerationRecord generate(const promptgen::PromptSpec& prompt, const GenerationConfig& config);

// Bounded-concurrency fan-out; results align with the prompt order.
std::vector<GenerationRecord> generate_many(const std::vector<promptgen::PromptSpec>& prompts,
                                            const GenerationConfig& config);

// Splits a completion into numbered-list solutions. Non-matching lines
// continue the previous solution; text before the first number is dropped.
std::vector<corpus::Solution> parse_numbered_list(const std::string& raw, int problem_id,
                                                  const std::string& variant_tag);

}  // namespace ideabench::genclient
