#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ideabench/corpus.hpp"

namespace ideabench::stats {

enum class AgreementBand { None, Fair, Moderate, Higher };

std::string to_string(AgreementBand band);

// Lower-inclusive band edges: <0.21 none, [0.21,0.41) fair, [0.41,0.60]
// moderate, >0.60 higher.
AgreementBand band_for_kappa(double kappa);

struct KappaResult {
  double kappa = 0.0;
  double observed_agreement = 0.0;
  double expected_agreement = 0.0;
  int n = 0;
  AgreementBand band = AgreementBand::None;
  bool degenerate = false;  // expected agreement 1 with observed < 1
};

KappaResult cohen_kappa(const std::vector<int>& a, const std::vector<int>& b);

struct AnovaResult {
  double f_stat = 0.0;
  int df_between = 0;
  int df_within = 0;
  double p_value = 1.0;
  std::vector<double> group_means;
  double grand_mean = 0.0;
  bool infinite_f = false;  // zero within-group variance with distinct means
};

AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups);

// Regularized I_x(a,b) via continued fraction with modified Lentz evaluation.
double incomplete_beta(double x, double a, double b);

enum class Dimension { Feasibility, Novelty, Usefulness };

std::string to_string(Dimension dimension);

struct RatingSummary {
  int problem_id = 0;
  corpus::Source source = corpus::Source::Human;
  Dimension dimension = Dimension::Feasibility;
  double mean = 0.0;
  double sd = 0.0;  // sample sd (n-1); 0 when n < 2
  int n = 0;
};

// Maps a solution_ref onto its (problem_id, source) group.
using RefResolver = std::function<std::pair<int, corpus::Source>(const std::string&)>;

// Understands the canonical "p{id}-{source}-{variant}-{n}" key format.
std::pair<int, corpus::Source> parse_canonical_ref(const std::string& ref);

// Mean/sd/n per (problem, source, dimension), ordered by that triple.
std::vector<RatingSummary> summarize_ratings(const std::vector<corpus::RatingRecord>& records,
                                             const RefResolver& resolver = parse_canonical_ref);

}  // namespace ideabench::stats
