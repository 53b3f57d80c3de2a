#pragma once

#include <map>
#include <string>
#include <vector>

#include "ideabench/embedder.hpp"

namespace ideabench::metrics {

struct SimilarityResult {
  int problem_id = 0;
  std::string variant_tag;
  std::vector<double> per_human;  // one value per human solution, order preserved
  double mean = 0.0;
  double sd = 0.0;  // sample sd over per_human; 0 when a single human solution
};

// For each human row, the highest cosine similarity to any generated row.
// problem_id and variant_tag are read from generated.set_ref.
SimilarityResult nearest_generated_sample(const embedder::EmbeddingMatrix& human,
                                          const embedder::EmbeddingMatrix& generated);

struct NoveltyResult {
  int problem_id = 0;
  std::map<std::string, double> per_set_volume;  // variant_tag -> hull volume
  double variance_explained_3 = 0.0;
  std::vector<std::string> degenerate_sets;
};

// One pooled PCA fit across every set of the problem, then per-set hull
// volumes in the shared 3-d frame. Map keys are variant tags.
NoveltyResult novelty_volumes(int problem_id,
                              const std::map<std::string, embedder::EmbeddingMatrix>& sets);

struct FewShotAggregate {
  int problem_id = 0;
  std::vector<double> run_values;  // exactly 5
  double mean = 0.0;
  double sd = 0.0;
};

FewShotAggregate aggregate_few_shot(int problem_id, const std::vector<double>& run_values);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
  bool sd_defined = false;  // false when fewer than 2 values
};

MeanSd column_mean_sd(const std::vector<double>& values);

}  // namespace ideabench::metrics
