#include "ideabench/promptgen.hpp"

#include <numeric>
#include <random>

#include "ideabench/errors.hpp"
#include "ideabench/rng.hpp"

namespace ideabench::promptgen {

std::string to_string(Adjective adjective) {
  switch (adjective) {
    case Adjective::Unique: return "unique";
    case Adjective::Novel: return "novel";
    case Adjective::Diverse: return "diverse";
  }
  throw DomainError("unknown adjective value");
}

Adjective adjective_from_string(std::string_view text) {
  if (text == "unique") return Adjective::Unique;
  if (text == "novel") return Adjective::Novel;
  if (text == "diverse") return Adjective::Diverse;
  throw ValidationError("unknown adjective: " + std::string(text) +
                        " (expected unique, novel, or diverse)");
}

std::string variant_tag(const PromptVariant& variant) {
  if (std::holds_alternative<BasePrompt>(variant)) return "base";
  if (const auto* z = std::get_if<ZeroShotPrompt>(&variant)) {
    return "zeroshot:" + to_string(z->adjective);
  }
  const auto& f = std::get<FewShotPrompt>(variant);
  return "fewshot:" + std::to_string(f.sample_ordinal);
}

namespace {

void check_problem(const corpus::DesignProblem& problem) {
  if (problem.text.empty()) throw ValidationError("problem text is empty");
  char last = problem.text.back();
  if (last == '.' || last == '!' || last == '?') {
    throw ValidationError("problem " + std::to_string(problem.id) +
                          " has terminal punctuation: " + problem.text);
  }
}

}  // namespace

PromptSpec build_prompt(const corpus::DesignProblem& problem, const PromptVariant& variant) {
  check_problem(problem);
  PromptSpec spec;
  spec.problem_id = problem.id;
  spec.variant = variant;
  if (std::holds_alternative<BasePrompt>(variant)) {
    spec.text = "Generate 100 design solutions for " + problem.text;
  } else if (const auto* z = std::get_if<ZeroShotPrompt>(&variant)) {
    spec.text = "Generate 100 " + to_string(z->adjective) + " design solutions for " + problem.text;
  } else {
    const auto& f = std::get<FewShotPrompt>(variant);
    if (f.exemplar.normalized_text.empty()) {
      throw ValidationError("few-shot exemplar has empty text");
    }
    if (f.exemplar.problem_id != problem.id) {
      throw ValidationError("few-shot exemplar belongs to problem " +
                            std::to_string(f.exemplar.problem_id) + ", prompt is for " +
                            std::to_string(problem.id));
    }
    spec.text = "Generate 100 design solutions for " + problem.text + "\nExample: " +
                f.exemplar.normalized_text + "\nSolutions:";
  }
  return spec;
}

std::vector<PromptVariant> sample_few_shot_variants(const corpus::SolutionSet& human_set,
                                                    int count, std::uint64_t rng_seed) {
  if (human_set.source != corpus::Source::Human) {
    throw DomainError("few-shot exemplars must come from a human set, got " + human_set.key());
  }
  if (count <= 0) throw DomainError("few-shot count must be positive");
  std::size_t n = human_set.solutions.size();
  if (n < static_cast<std::size_t>(count)) {
    throw DomainError("few-shot sampling needs " + std::to_string(count) +
                      " human solutions, set " + human_set.key() + " has " + std::to_string(n));
  }
  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  std::mt19937_64 gen(rng_seed);
  std::vector<PromptVariant> variants;
  variants.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    std::size_t remaining = n - static_cast<std::size_t>(i);
    std::size_t j = static_cast<std::size_t>(i) + rng::bounded(gen, remaining);
    std::swap(indices[static_cast<std::size_t>(i)], indices[j]);
    std::size_t pick = indices[static_cast<std::size_t>(i)];
    FewShotPrompt f;
    f.exemplar = human_set.solutions[pick];
    f.exemplar_ref = corpus::solution_ref(human_set, pick);
    f.sample_ordinal = i + 1;
    variants.push_back(std::move(f));
  }
  return variants;
}

}  // namespace ideabench::promptgen
