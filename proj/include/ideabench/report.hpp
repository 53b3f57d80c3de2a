#pragma once

#include <map>
#include <string>
#include <vector>

#include "ideabench/metrics.hpp"
#include "ideabench/stats.hpp"

#include <json.hpp>

namespace ideabench::report {

// Fixed-decimal formatting with round-half-even ties, e.g. (0.0625, 3) -> "0.062".
std::string format_number(double value, int decimals);

struct RenderedTable {
  std::string markdown;
  std::string csv;
  std::vector<std::string> notes;  // column gaps, degeneracy, omitted Mean row
};

// Rows ascending by problem, columns Base / zero-shot adjectives / few-shot,
// cells "0.737 (SD=0.05)", bottom Mean row when more than one problem.
RenderedTable render_similarity_table(const std::vector<metrics::SimilarityResult>& results,
                                      const std::vector<metrics::FewShotAggregate>& few_shot);

// Same shape with a Human column first; cells are hull volumes, degenerate
// sets render "0.000*" with a footnote.
RenderedTable render_novelty_table(const std::vector<metrics::NoveltyResult>& results,
                                   const std::vector<metrics::FewShotAggregate>& few_shot);

struct RenderedChart {
  std::string svg;
  std::string csv;
};

// Grouped bars, x = dimension x source, height = mean, error bar = sd,
// one color per problem. Output bytes are deterministic for identical input.
RenderedChart render_ratings_chart(const std::vector<stats::RatingSummary>& summaries);

// The documented metric conventions (similarity direction, PCA pooling, SD
// definitions); embedded in both metrics.json and manifest.json.
nlohmann::json conventions_json();

struct RunManifest {
  nlohmann::json config_snapshot;
  std::map<std::string, std::string> input_digests;  // path -> sha256
  std::string tool_version;
  std::map<std::string, std::string> stage_timestamps;
  std::map<std::string, double> variance_explained_3;  // problem id -> ratio
  std::vector<std::string> notes;

  nlohmann::json to_json() const;
};

}  // namespace ideabench::report
