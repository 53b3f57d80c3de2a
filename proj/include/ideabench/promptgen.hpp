#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ideabench/corpus.hpp"

namespace ideabench::promptgen {

enum class Adjective { Unique, Novel, Diverse };

std::string to_string(Adjective adjective);
Adjective adjective_from_string(std::string_view text);

struct BasePrompt {
  bool operator==(const BasePrompt&) const = default;
};

struct ZeroShotPrompt {
  Adjective adjective = Adjective::Unique;

  bool operator==(const ZeroShotPrompt&) const = default;
};

struct FewShotPrompt {
  corpus::Solution exemplar;
  std::string exemplar_ref;  // solution_ref of the exemplar within its human set
  int sample_ordinal = 1;    // 1..count within one sampling call

  bool operator==(const FewShotPrompt&) const = default;
};

using PromptVariant = std::variant<BasePrompt, ZeroShotPrompt, FewShotPrompt>;

// "base", "zeroshot:unique", "fewshot:3" (few-shot keyed by sample ordinal).
std::string variant_tag(const PromptVariant& variant);

struct PromptSpec {
  int problem_id = 0;
  PromptVariant variant;
  std::string text;  // fully rendered prompt

  bool operator==(const PromptSpec&) const = default;
};

PromptSpec build_prompt(const corpus::DesignProblem& problem, const PromptVariant& variant);

// Samples `count` distinct human exemplars without replacement (partial
// Fisher-Yates over mt19937_64), ordinals 1..count. Pure in (set, count, seed).
std::vector<PromptVariant> sample_few_shot_variants(const corpus::SolutionSet& human_set,
                                                    int count, std::uint64_t rng_seed);

}  // namespace ideabench::promptgen
