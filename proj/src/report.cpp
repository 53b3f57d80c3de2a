#include "ideabench/report.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "ideabench/errors.hpp"

namespace ideabench::report {

std::string format_number(double value, int decimals) {
  if (decimals < 0 || decimals > 12) throw DomainError("format_number: bad decimals");
  if (!std::isfinite(value)) throw DomainError("format_number: non-finite value");
  double pow10 = std::pow(10.0, decimals);
  // nearbyint under the default rounding mode gives ties-to-even.
  long long scaled = static_cast<long long>(std::nearbyint(value * pow10));
  bool negative = scaled < 0;
  unsigned long long mag =
      negative ? static_cast<unsigned long long>(-scaled) : static_cast<unsigned long long>(scaled);
  std::string digits = std::to_string(mag);
  if (decimals == 0) return (negative ? "-" : "") + digits;
  if (digits.size() <= static_cast<std::size_t>(decimals)) {
    digits.insert(0, static_cast<std::size_t>(decimals) + 1 - digits.size(), '0');
  }
  digits.insert(digits.size() - static_cast<std::size_t>(decimals), ".");
  return (negative ? "-" : "") + digits;
}

namespace {

constexpr const char* kEmDash = "\xE2\x80\x94";  // table placeholder for missing cells

std::string value_sd_cell(double mean, double sd) {
  return format_number(mean, 3) + " (SD=" + format_number(sd, 2) + ")";
}

struct ColumnSpec {
  std::string tag;     // key into per-problem values
  std::string header;  // display name
  std::string csv;     // csv column stem
};

struct CellValue {
  double mean = 0.0;
  double sd = 0.0;
  bool has_sd = false;
  bool degenerate = false;
  bool present = false;
};

RenderedTable render_table(const std::vector<ColumnSpec>& columns,
                           const std::map<int, std::map<std::string, CellValue>>& cells,
                           bool any_degenerate) {
  RenderedTable out;
  std::ostringstream md, csv;

  md << "| Problem |";
  csv << "problem_id";
  for (const ColumnSpec& col : columns) {
    md << " " << col.header << " |";
    csv << "," << col.csv << "_mean," << col.csv << "_sd";
  }
  md << "\n|---|";
  csv << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) md << "---|";
  md << "\n";

  std::map<std::string, std::vector<double>> column_values;
  for (const auto& [problem_id, row] : cells) {
    md << "| " << problem_id << " |";
    csv << problem_id;
    for (const ColumnSpec& col : columns) {
      auto it = row.find(col.tag);
      if (it == row.end() || !it->second.present) {
        md << " " << kEmDash << " |";
        csv << ",,";
        out.notes.push_back("problem " + std::to_string(problem_id) + " has no " + col.tag +
                            " value");
        continue;
      }
      const CellValue& cell = it->second;
      std::string rendered = cell.has_sd ? value_sd_cell(cell.mean, cell.sd)
                                         : format_number(cell.mean, 3);
      if (cell.degenerate) rendered += "*";
      md << " " << rendered << " |";
      csv << "," << format_number(cell.mean, 3) << ","
          << (cell.has_sd ? format_number(cell.sd, 2) : "");
      column_values[col.tag].push_back(cell.mean);
    }
    md << "\n";
    csv << "\n";
  }

  if (cells.size() > 1) {
    md << "| Mean |";
    csv << "mean";
    for (const ColumnSpec& col : columns) {
      auto it = column_values.find(col.tag);
      if (it == column_values.end()) {
        md << " " << kEmDash << " |";
        csv << ",,";
        continue;
      }
      metrics::MeanSd ms = metrics::column_mean_sd(it->second);
      md << " " << value_sd_cell(ms.mean, ms.sd) << " |";
      csv << "," << format_number(ms.mean, 3) << "," << format_number(ms.sd, 2);
    }
    md << "\n";
    csv << "\n";
  } else {
    out.notes.push_back("single problem (n=1); Mean row omitted");
  }
  if (any_degenerate) {
    md << "\n\\* degenerate set: projected points coincident, collinear, or coplanar; volume "
          "reported as 0\n";
  }

  out.markdown = md.str();
  out.csv = csv.str();
  return out;
}

}  // namespace

RenderedTable render_similarity_table(const std::vector<metrics::SimilarityResult>& results,
                                      const std::vector<metrics::FewShotAggregate>& few_shot) {
  if (results.empty() && few_shot.empty()) {
    throw DomainError("render_similarity_table: no results");
  }
  const std::vector<ColumnSpec> columns = {
      {"base", "Base", "base"},
      {"zeroshot:unique", "Zero-shot (unique)", "zeroshot_unique"},
      {"zeroshot:novel", "Zero-shot (novel)", "zeroshot_novel"},
      {"zeroshot:diverse", "Zero-shot (diverse)", "zeroshot_diverse"},
      {"fewshot", "Few-shot", "fewshot"},
  };
  std::map<int, std::map<std::string, CellValue>> cells;
  for (const metrics::SimilarityResult& r : results) {
    cells[r.problem_id][r.variant_tag] = {r.mean, r.sd, true, false, true};
  }
  for (const metrics::FewShotAggregate& agg : few_shot) {
    cells[agg.problem_id]["fewshot"] = {agg.mean, agg.sd, true, false, true};
  }
  return render_table(columns, cells, false);
}

RenderedTable render_novelty_table(const std::vector<metrics::NoveltyResult>& results,
                                   const std::vector<metrics::FewShotAggregate>& few_shot) {
  if (results.empty()) throw DomainError("render_novelty_table: no results");
  const std::vector<ColumnSpec> columns = {
      {"human", "Human", "human"},
      {"base", "Base", "base"},
      {"zeroshot:unique", "Zero-shot (unique)", "zeroshot_unique"},
      {"zeroshot:novel", "Zero-shot (novel)", "zeroshot_novel"},
      {"zeroshot:diverse", "Zero-shot (diverse)", "zeroshot_diverse"},
      {"fewshot", "Few-shot", "fewshot"},
  };
  std::map<int, std::map<std::string, CellValue>> cells;
  bool any_degenerate = false;
  for (const metrics::NoveltyResult& r : results) {
    for (const auto& [tag, volume] : r.per_set_volume) {
      // Individual few-shot runs are folded into the aggregate column.
      if (tag.rfind("fewshot:", 0) == 0) continue;
      bool degenerate = std::find(r.degenerate_sets.begin(), r.degenerate_sets.end(), tag) !=
                        r.degenerate_sets.end();
      any_degenerate = any_degenerate || degenerate;
      cells[r.problem_id][tag] = {volume, 0.0, false, degenerate, true};
    }
  }
  for (const metrics::FewShotAggregate& agg : few_shot) {
    cells[agg.problem_id]["fewshot"] = {agg.mean, agg.sd, true, false, true};
  }
  return render_table(columns, cells, any_degenerate);
}

namespace {

const std::vector<std::string> kPalette = {
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a145", "#edc948",
    "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#2f4b7c", "#d45087",
};

std::string fmt2(double v) { return format_number(v, 2); }

}  // namespace

RenderedChart render_ratings_chart(const std::vector<stats::RatingSummary>& summaries) {
  if (summaries.empty()) throw DomainError("render_ratings_chart: no summaries");
  for (const stats::RatingSummary& s : summaries) {
    if (s.mean < 0.0 || s.mean > 2.0) {
      throw ValidationError("rating mean outside [0,2] for problem " +
                            std::to_string(s.problem_id));
    }
    if (s.sd < 0.0) {
      throw ValidationError("negative rating sd for problem " + std::to_string(s.problem_id));
    }
  }

  std::vector<stats::RatingSummary> sorted = summaries;
  std::sort(sorted.begin(), sorted.end(),
            [](const stats::RatingSummary& a, const stats::RatingSummary& b) {
              if (a.dimension != b.dimension) return a.dimension < b.dimension;
              if (a.source != b.source) return a.source < b.source;
              return a.problem_id < b.problem_id;
            });

  std::set<int> problem_set;
  for (const auto& s : sorted) problem_set.insert(s.problem_id);
  std::vector<int> problems(problem_set.begin(), problem_set.end());
  auto color_of = [&](int problem_id) {
    std::size_t idx = static_cast<std::size_t>(
        std::find(problems.begin(), problems.end(), problem_id) - problems.begin());
    return kPalette[idx % kPalette.size()];
  };

  // Bars laid out group by group; a group is one (dimension, source) pair.
  struct Group {
    std::string label;
    std::vector<const stats::RatingSummary*> bars;
  };
  std::vector<Group> groups;
  for (const auto& s : sorted) {
    std::string label = stats::to_string(s.dimension) + " / " + corpus::to_string(s.source);
    if (groups.empty() || groups.back().label != label) groups.push_back({label, {}});
    groups.back().bars.push_back(&s);
  }

  const double bar_w = 22.0, bar_gap = 4.0, group_gap = 34.0;
  const double margin_l = 60.0, margin_t = 30.0, plot_h = 300.0, label_h = 80.0;
  const double y_max = 2.0;
  double x = margin_l;
  std::ostringstream bars_svg;
  std::ostringstream csv;
  csv << "problem_id,source,dimension,mean,sd,n\n";
  auto y_of = [&](double v) { return margin_t + plot_h * (1.0 - v / y_max); };

  for (const Group& group : groups) {
    double group_start = x;
    for (const stats::RatingSummary* s : group.bars) {
      double h = plot_h * (s->mean / y_max);
      bars_svg << "  <rect class=\"bar\" x=\"" << fmt2(x) << "\" y=\"" << fmt2(y_of(s->mean))
               << "\" width=\"" << fmt2(bar_w) << "\" height=\"" << fmt2(h) << "\" fill=\""
               << color_of(s->problem_id) << "\"/>\n";
      double cx = x + bar_w / 2.0;
      double lo = std::max(0.0, s->mean - s->sd);
      double hi = std::min(y_max, s->mean + s->sd);
      bars_svg << "  <line class=\"err\" x1=\"" << fmt2(cx) << "\" y1=\"" << fmt2(y_of(lo))
               << "\" x2=\"" << fmt2(cx) << "\" y2=\"" << fmt2(y_of(hi))
               << "\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n";
      for (double v : {lo, hi}) {
        bars_svg << "  <line class=\"errcap\" x1=\"" << fmt2(cx - 5.0) << "\" y1=\""
                 << fmt2(y_of(v)) << "\" x2=\"" << fmt2(cx + 5.0) << "\" y2=\"" << fmt2(y_of(v))
                 << "\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n";
      }
      csv << s->problem_id << "," << corpus::to_string(s->source) << ","
          << stats::to_string(s->dimension) << "," << format_number(s->mean, 3) << ","
          << format_number(s->sd, 3) << "," << s->n << "\n";
      x += bar_w + bar_gap;
    }
    double group_end = x - bar_gap;
    bars_svg << "  <text class=\"grouplabel\" x=\"" << fmt2((group_start + group_end) / 2.0)
             << "\" y=\"" << fmt2(margin_t + plot_h + 16.0)
             << "\" text-anchor=\"middle\" font-size=\"11\">" << group.label << "</text>\n";
    x += group_gap;
  }
  double width = x - group_gap + 20.0;
  double height = margin_t + plot_h + label_h;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt2(width) << "\" height=\""
      << fmt2(height) << "\" viewBox=\"0 0 " << fmt2(width) << " " << fmt2(height) << "\">\n";
  svg << "  <rect x=\"0\" y=\"0\" width=\"" << fmt2(width) << "\" height=\"" << fmt2(height)
      << "\" fill=\"#ffffff\"/>\n";
  for (double tick = 0.0; tick <= y_max + 1e-9; tick += 0.5) {
    svg << "  <line class=\"grid\" x1=\"" << fmt2(margin_l - 6.0) << "\" y1=\"" << fmt2(y_of(tick))
        << "\" x2=\"" << fmt2(width - 10.0) << "\" y2=\"" << fmt2(y_of(tick))
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "  <text class=\"ytick\" x=\"" << fmt2(margin_l - 10.0) << "\" y=\""
        << fmt2(y_of(tick) + 4.0) << "\" text-anchor=\"end\" font-size=\"11\">"
        << format_number(tick, 1) << "</text>\n";
  }
  svg << bars_svg.str();
  double legend_y = margin_t + plot_h + 40.0;
  double legend_x = margin_l;
  for (int problem_id : problems) {
    svg << "  <rect class=\"legend\" x=\"" << fmt2(legend_x) << "\" y=\"" << fmt2(legend_y - 10.0)
        << "\" width=\"12\" height=\"12\" fill=\"" << color_of(problem_id) << "\"/>\n";
    svg << "  <text x=\"" << fmt2(legend_x + 16.0) << "\" y=\"" << fmt2(legend_y)
        << "\" font-size=\"11\">P" << problem_id << "</text>\n";
    legend_x += 60.0;
  }
  svg << "</svg>\n";

  RenderedChart chart;
  chart.svg = svg.str();
  chart.csv = csv.str();
  return chart;
}

nlohmann::json conventions_json() {
  return {
      {"similarity_direction",
       "cosine similarity to the nearest generated sample; 1 means the generated set covers "
       "every human solution"},
      {"pca_pooling", "one PCA fit pooled across all variant sets of a problem"},
      {"sd_convention",
       "sample standard deviation (n-1): per-human for similarity cells, across problems for "
       "Mean rows, across runs for few-shot aggregates"},
      {"embedding_normalization", "provider vectors passed through unmodified"},
  };
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["config"] = config_snapshot;
  j["input_digests"] = input_digests;
  j["tool_version"] = tool_version;
  j["stage_timestamps"] = stage_timestamps;
  j["variance_explained_3"] = variance_explained_3;
  j["notes"] = notes;
  j["conventions"] = conventions_json();
  return j;
}

}  // namespace ideabench::report
