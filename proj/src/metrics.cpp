#include "ideabench/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ideabench/errors.hpp"
#include "ideabench/numkernel.hpp"

namespace ideabench::metrics {

namespace {

struct SetKey {
  int problem_id = 0;
  std::string variant_tag;
};

// set_ref format: "p{id}-{source}-{variant_tag}"
SetKey parse_set_ref(const std::string& ref) {
  std::size_t dash = ref.find('-');
  std::size_t dash2 = dash == std::string::npos ? std::string::npos : ref.find('-', dash + 1);
  if (ref.size() < 2 || ref[0] != 'p' || dash2 == std::string::npos) {
    throw DomainError("malformed set_ref: " + ref);
  }
  SetKey key;
  try {
    std::size_t pos = 0;
    key.problem_id = std::stoi(ref.substr(1, dash - 1), &pos);
    if (pos != dash - 1) throw std::invalid_argument("trailing junk");
  } catch (const std::exception&) {
    throw DomainError("malformed set_ref: " + ref);
  }
  key.variant_tag = ref.substr(dash2 + 1);
  return key;
}

MeanSd mean_sd_of(const std::vector<double>& values) {
  MeanSd out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) {
      double e = v - out.mean;
      ss += e * e;
    }
    out.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    out.sd_defined = true;
  }
  return out;
}

}  // namespace

SimilarityResult nearest_generated_sample(const embedder::EmbeddingMatrix& human,
                                          const embedder::EmbeddingMatrix& generated) {
  if (human.rows.empty()) throw DomainError("nearest_generated_sample: empty human set");
  if (generated.rows.empty()) {
    throw DomainError("nearest_generated_sample: empty generated set " + generated.set_ref);
  }
  if (human.dim != generated.dim) {
    throw DomainError("nearest_generated_sample: dim mismatch, " + std::to_string(human.dim) +
                      " vs " + std::to_string(generated.dim));
  }
  SetKey key = parse_set_ref(generated.set_ref);
  SimilarityResult result;
  result.problem_id = key.problem_id;
  result.variant_tag = key.variant_tag;
  result.per_human.reserve(human.rows.size());
  for (const auto& h : human.rows) {
    double best = -1.0;
    for (const auto& g : generated.rows) {
      best = std::max(best, numkernel::cosine_similarity(h, g));
    }
    result.per_human.push_back(best);
  }
  MeanSd ms = mean_sd_of(result.per_human);
  result.mean = ms.mean;
  result.sd = ms.sd;
  return result;
}

NoveltyResult novelty_volumes(int problem_id,
                              const std::map<std::string, embedder::EmbeddingMatrix>& sets) {
  if (sets.empty()) throw DomainError("novelty_volumes: no sets");
  std::vector<std::vector<double>> pooled;
  for (const auto& [tag, matrix] : sets) {
    for (const auto& row : matrix.rows) pooled.push_back(row);
  }
  if (pooled.size() < 4) {
    throw DomainError("novelty_volumes: pooled rows must be >= 4, got " +
                      std::to_string(pooled.size()));
  }

  numkernel::PcaModel model = numkernel::pca_fit(pooled, 3);
  NoveltyResult result;
  result.problem_id = problem_id;
  if (model.total_variance > 0.0) {
    double captured = 0.0;
    for (double v : model.explained_variance) captured += v;
    result.variance_explained_3 = std::clamp(captured / model.total_variance, 0.0, 1.0);
  } else {
    result.variance_explained_3 = 1.0;  // no variance at all, trivially captured
  }

  for (const auto& [tag, matrix] : sets) {
    std::vector<std::vector<double>> proj = numkernel::pca_project(model, matrix.rows);
    std::vector<numkernel::Point3> pts;
    pts.reserve(proj.size());
    for (const auto& p : proj) pts.push_back({p[0], p[1], p[2]});
    numkernel::Hull3 hull = numkernel::convex_hull_volume_3d(pts);
    result.per_set_volume[tag] = hull.volume;
    if (hull.degenerate) result.degenerate_sets.push_back(tag);
  }
  return result;
}

FewShotAggregate aggregate_few_shot(int problem_id, const std::vector<double>& run_values) {
  if (run_values.size() != 5) {
    throw DomainError("few-shot aggregation needs exactly 5 runs, got " +
                      std::to_string(run_values.size()));
  }
  FewShotAggregate agg;
  agg.problem_id = problem_id;
  agg.run_values = run_values;
  MeanSd ms = mean_sd_of(run_values);
  agg.mean = ms.mean;
  agg.sd = ms.sd;
  return agg;
}

MeanSd column_mean_sd(const std::vector<double>& values) {
  if (values.empty()) throw DomainError("column_mean_sd: empty column");
  return mean_sd_of(values);
}

}  // namespace ideabench::metrics
