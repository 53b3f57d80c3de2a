#include <string>
#include <vector>

#include <doctest.h>

#include "ideabench/errors.hpp"
#include "ideabench/report.hpp"

using namespace ideabench;

namespace {

metrics::SimilarityResult sim(int problem, const std::string& tag, double mean, double sd) {
  metrics::SimilarityResult r;
  r.problem_id = problem;
  r.variant_tag = tag;
  r.per_human = {mean};
  r.mean = mean;
  r.sd = sd;
  return r;
}

metrics::FewShotAggregate few(int problem, double mean, double sd) {
  metrics::FewShotAggregate f;
  f.problem_id = problem;
  f.run_values = {mean, mean, mean, mean, mean};
  f.mean = mean;
  f.sd = sd;
  return f;
}

stats::RatingSummary summary(int problem, corpus::Source source, stats::Dimension dim,
                             double mean, double sd, int n) {
  stats::RatingSummary s;
  s.problem_id = problem;
  s.source = source;
  s.dimension = dim;
  s.mean = mean;
  s.sd = sd;
  s.n = n;
  return s;
}

}  // namespace

TEST_CASE("format_number rounds half to even at fixed decimals") {
  CHECK(report::format_number(0.748, 3) == "0.748");
  CHECK(report::format_number(0.0625, 3) == "0.062");  // tie, rounds to even 2
  CHECK(report::format_number(0.0635, 3) == "0.064");  // tie, rounds to even 4
  CHECK(report::format_number(2.5, 0) == "2");
  CHECK(report::format_number(3.5, 0) == "4");
  CHECK(report::format_number(0.05, 2) == "0.05");
  CHECK(report::format_number(-0.7, 3) == "-0.700");
  CHECK(report::format_number(1.0, 2) == "1.00");
  CHECK(report::format_number(0.2, 1) == "0.2");
  CHECK_THROWS_AS(report::format_number(0.5, -1), DomainError);
  CHECK_THROWS_AS(report::format_number(std::nan(""), 2), DomainError);
}

TEST_CASE("similarity table reproduces the published aggregation shape") {
  std::vector<double> base{0.737, 0.627, 0.727, 0.778, 0.796, 0.807,
                           0.768, 0.704, 0.770, 0.765, 0.738, 0.753};
  std::vector<metrics::SimilarityResult> results;
  std::vector<metrics::FewShotAggregate> aggregates;
  for (int i = 0; i < 12; ++i) {
    results.push_back(sim(i + 1, "base", base[i], 0.05));
    aggregates.push_back(few(i + 1, 0.8, 0.05));
  }
  auto table = report::render_similarity_table(results, aggregates);
  CHECK(table.markdown.find("| Mean | 0.748") != std::string::npos);
  CHECK(table.markdown.find("| 1 | 0.737 (SD=0.05) |") != std::string::npos);
  CHECK(table.csv.find("problem_id,base_mean,base_sd") == 0);
  CHECK(table.csv.find("\nmean,0.748") != std::string::npos);
}

TEST_CASE("similarity table renders missing variants as an em dash with a note") {
  std::vector<metrics::SimilarityResult> results{
      sim(1, "base", 0.7, 0.05),
      sim(2, "base", 0.8, 0.05),
      sim(1, "zeroshot:unique", 0.6, 0.04),
  };
  auto table = report::render_similarity_table(results, {});
  CHECK(table.markdown.find("\xE2\x80\x94") != std::string::npos);
  bool noted = false;
  for (const auto& note : table.notes) {
    if (note.find("zeroshot:unique") != std::string::npos ||
        note.find("missing") != std::string::npos) {
      noted = true;
    }
  }
  CHECK(noted);
}

TEST_CASE("single-problem tables omit the mean row") {
  auto table = report::render_similarity_table({sim(3, "base", 0.7, 0.02)}, {});
  CHECK(table.markdown.find("| Mean") == std::string::npos);
  bool noted = false;
  for (const auto& note : table.notes) {
    if (note.find("Mean row omitted") != std::string::npos) noted = true;
  }
  CHECK(noted);
}

TEST_CASE("empty similarity results are an error") {
  CHECK_THROWS_AS(report::render_similarity_table({}, {}), DomainError);
}

TEST_CASE("novelty table puts the human column first and stars degenerates") {
  std::vector<double> human{0.249, 0.244, 0.322, 0.317, 0.338, 0.261,
                            0.330, 0.277, 0.327, 0.307, 0.303, 0.254};
  std::vector<double> base{0.324, 0.197, 0.238, 0.193, 0.368, 0.164,
                           0.308, 0.121, 0.196, 0.400, 0.280, 0.321};
  std::vector<metrics::NoveltyResult> results;
  for (int i = 0; i < 12; ++i) {
    metrics::NoveltyResult r;
    r.problem_id = i + 1;
    r.per_set_volume["human"] = human[i];
    r.per_set_volume["base"] = base[i];
    r.variance_explained_3 = 0.5;
    if (i == 2) {
      r.per_set_volume["zeroshot:novel"] = 0.0;
      r.degenerate_sets.push_back("zeroshot:novel");
    }
    results.push_back(r);
  }
  auto table = report::render_novelty_table(results, {});
  auto header_pos = table.markdown.find("| Problem | Human |");
  CHECK(header_pos != std::string::npos);
  CHECK(table.markdown.find("0.000*") != std::string::npos);
  CHECK(table.markdown.find("| Mean | 0.294") != std::string::npos);
  CHECK(table.markdown.find("| Mean | 0.294") > header_pos);
  CHECK(table.markdown.find("0.259") != std::string::npos);
  CHECK(table.markdown.find("degenerate set") != std::string::npos);
}

TEST_CASE("ratings chart is deterministic and validates its inputs") {
  std::vector<stats::RatingSummary> summaries;
  for (int problem : {1, 2, 3}) {
    for (auto source : {corpus::Source::Human, corpus::Source::Generated}) {
      for (auto dim : {stats::Dimension::Feasibility, stats::Dimension::Novelty,
                       stats::Dimension::Usefulness}) {
        summaries.push_back(summary(problem, source, dim, 1.0 + 0.1 * problem, 0.2, 8));
      }
    }
  }
  auto a = report::render_ratings_chart(summaries);
  auto b = report::render_ratings_chart(summaries);
  CHECK(a.svg == b.svg);
  CHECK(a.csv == b.csv);
  CHECK(a.svg.find("<svg") == 0);
  CHECK(a.csv.find("problem_id,source,dimension,mean,sd,n") == 0);

  // 3 problems x 3 dimensions x 2 sources = 18 bars
  std::size_t bars = 0;
  for (std::size_t pos = a.svg.find("class=\"bar\""); pos != std::string::npos;
       pos = a.svg.find("class=\"bar\"", pos + 1)) {
    ++bars;
  }
  CHECK(bars == 18);

  auto shuffled = summaries;
  std::swap(shuffled.front(), shuffled.back());
  auto c = report::render_ratings_chart(shuffled);
  CHECK(c.svg == a.svg);  // input order does not matter

  auto bad = summaries;
  bad[0].mean = 2.4;
  CHECK_THROWS_AS(report::render_ratings_chart(bad), ValidationError);
  bad[0].mean = -0.1;
  CHECK_THROWS_AS(report::render_ratings_chart(bad), ValidationError);
  CHECK_THROWS_AS(report::render_ratings_chart({}), DomainError);
}

TEST_CASE("zero sd renders a degenerate error bar without failing") {
  auto chart = report::render_ratings_chart(
      {summary(1, corpus::Source::Human, stats::Dimension::Novelty, 1.5, 0.0, 4)});
  CHECK(chart.svg.find("<svg") == 0);
}

TEST_CASE("conventions documentation is stable") {
  auto conventions = report::conventions_json();
  CHECK(conventions.contains("similarity_direction"));
  CHECK(conventions.contains("pca_pooling"));
  CHECK(conventions.contains("sd_convention"));
  CHECK(conventions.contains("embedding_normalization"));
}

TEST_CASE("run manifest serializes every section") {
  report::RunManifest manifest;
  manifest.config_snapshot = {{"seed", 42}};
  manifest.input_digests["data/problems.jsonl"] = std::string(64, 'a');
  manifest.tool_version = "0.1.0";
  manifest.stage_timestamps["prompts"] = "2024-01-01T00:00:00Z";
  manifest.variance_explained_3["1"] = 0.75;
  manifest.notes.push_back("note");
  auto j = manifest.to_json();
  CHECK(j["config"]["seed"] == 42);
  CHECK(j["input_digests"]["data/problems.jsonl"] == std::string(64, 'a'));
  CHECK(j["tool_version"] == "0.1.0");
  CHECK(j["conventions"].contains("pca_pooling"));
  CHECK(j["variance_explained_3"]["1"] == 0.75);
}
