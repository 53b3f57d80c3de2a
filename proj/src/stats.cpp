#include "ideabench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "ideabench/errors.hpp"

namespace ideabench::stats {

std::string to_string(AgreementBand band) {
  switch (band) {
    case AgreementBand::None: return "none";
    case AgreementBand::Fair: return "fair";
    case AgreementBand::Moderate: return "moderate";
    case AgreementBand::Higher: return "higher";
  }
  throw DomainError("unknown agreement band");
}

AgreementBand band_for_kappa(double kappa) {
  if (kappa > 0.60) return AgreementBand::Higher;
  if (kappa >= 0.41) return AgreementBand::Moderate;
  if (kappa >= 0.21) return AgreementBand::Fair;
  return AgreementBand::None;
}

KappaResult cohen_kappa(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) {
    throw DomainError("kappa: rater lists differ in length, " + std::to_string(a.size()) +
                      " vs " + std::to_string(b.size()));
  }
  if (a.empty()) throw DomainError("kappa: empty rating lists");
  double n = static_cast<double>(a.size());
  std::map<int, int> count_a, count_b;
  int agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++count_a[a[i]];
    ++count_b[b[i]];
    if (a[i] == b[i]) ++agree;
  }
  double p_o = static_cast<double>(agree) / n;
  double p_e = 0.0;
  for (const auto& [cat, ca] : count_a) {
    auto it = count_b.find(cat);
    if (it != count_b.end()) {
      p_e += (static_cast<double>(ca) / n) * (static_cast<double>(it->second) / n);
    }
  }
  KappaResult r;
  r.observed_agreement = p_o;
  r.expected_agreement = p_e;
  r.n = static_cast<int>(a.size());
  if (p_e >= 1.0) {
    if (p_o >= 1.0) {
      r.kappa = 1.0;
    } else {
      r.kappa = 0.0;
      r.degenerate = true;
    }
  } else {
    r.kappa = (p_o - p_e) / (1.0 - p_e);
  }
  r.band = band_for_kappa(r.kappa);
  return r;
}

AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) {
    throw DomainError("anova: needs at least 2 groups, got " + std::to_string(groups.size()));
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].size() < 2) {
      throw DomainError("anova: group " + std::to_string(g) + " has fewer than 2 observations");
    }
  }
  std::size_t k = groups.size();
  std::size_t total = 0;
  double grand_sum = 0.0;
  AnovaResult r;
  for (const auto& g : groups) {
    double sum = 0.0;
    for (double x : g) sum += x;
    r.group_means.push_back(sum / static_cast<double>(g.size()));
    grand_sum += sum;
    total += g.size();
  }
  r.grand_mean = grand_sum / static_cast<double>(total);
  double ss_between = 0.0, ss_within = 0.0;
  for (std::size_t g = 0; g < k; ++g) {
    double diff = r.group_means[g] - r.grand_mean;
    ss_between += static_cast<double>(groups[g].size()) * diff * diff;
    for (double x : groups[g]) {
      double e = x - r.group_means[g];
      ss_within += e * e;
    }
  }
  r.df_between = static_cast<int>(k) - 1;
  r.df_within = static_cast<int>(total - k);
  double ms_between = ss_between / static_cast<double>(r.df_between);
  double ms_within = ss_within / static_cast<double>(r.df_within);
  if (ms_within == 0.0) {
    if (ms_between > 0.0) {
      r.f_stat = std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
      r.infinite_f = true;
    } else {
      r.f_stat = 0.0;
      r.p_value = 1.0;
    }
    return r;
  }
  r.f_stat = ms_between / ms_within;
  double df1 = static_cast<double>(r.df_between);
  double df2 = static_cast<double>(r.df_within);
  r.p_value = incomplete_beta(df2 / (df2 + df1 * r.f_stat), df2 / 2.0, df1 / 2.0);
  return r;
}

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
  constexpr double kEps = 1e-12;
  constexpr double kFpMin = 1e-300;
  constexpr int kMaxIter = 300;
  double qab = a + b;
  double qap = a + 1.0;
  double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw NumericError("incomplete beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete beta: x outside [0,1]");
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete beta: a and b must be positive");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

std::string to_string(Dimension dimension) {
  switch (dimension) {
    case Dimension::Feasibility: return "feasibility";
    case Dimension::Novelty: return "novelty";
    case Dimension::Usefulness: return "usefulness";
  }
  throw DomainError("unknown dimension");
}

std::pair<int, corpus::Source> parse_canonical_ref(const std::string& ref) {
  if (ref.size() < 2 || ref[0] != 'p') {
    throw DomainError("cannot resolve solution_ref: " + ref);
  }
  std::size_t dash = ref.find('-', 1);
  if (dash == std::string::npos) throw DomainError("cannot resolve solution_ref: " + ref);
  int problem_id = 0;
  try {
    std::size_t pos = 0;
    problem_id = std::stoi(ref.substr(1, dash - 1), &pos);
    if (pos != dash - 1) throw std::invalid_argument("trailing junk");
  } catch (const std::exception&) {
    throw DomainError("cannot resolve solution_ref: " + ref);
  }
  if (problem_id < 1) throw DomainError("cannot resolve solution_ref: " + ref);
  std::size_t dash2 = ref.find('-', dash + 1);
  if (dash2 == std::string::npos) throw DomainError("cannot resolve solution_ref: " + ref);
  std::string source_token = ref.substr(dash + 1, dash2 - dash - 1);
  corpus::Source source;
  try {
    source = corpus::source_from_string(source_token);
  } catch (const ValidationError&) {
    throw DomainError("cannot resolve solution_ref: " + ref);
  }
  return {problem_id, source};
}

std::vector<RatingSummary> summarize_ratings(const std::vector<corpus::RatingRecord>& records,
                                             const RefResolver& resolver) {
  if (records.empty()) throw DomainError("summarize_ratings: no records");
  // key: (problem, source, dimension) -> observations
  std::map<std::tuple<int, int, int>, std::vector<double>> groups;
  for (const corpus::RatingRecord& rec : records) {
    auto [problem_id, source] = resolver(rec.solution_ref);
    int src = static_cast<int>(source);
    groups[{problem_id, src, static_cast<int>(Dimension::Feasibility)}].push_back(rec.feasibility);
    groups[{problem_id, src, static_cast<int>(Dimension::Novelty)}].push_back(rec.novelty);
    groups[{problem_id, src, static_cast<int>(Dimension::Usefulness)}].push_back(rec.usefulness);
  }
  std::vector<RatingSummary> out;
  for (const auto& [key, values] : groups) {
    RatingSummary s;
    s.problem_id = std::get<0>(key);
    s.source = static_cast<corpus::Source>(std::get<1>(key));
    s.dimension = static_cast<Dimension>(std::get<2>(key));
    s.n = static_cast<int>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values) {
        double e = v - s.mean;
        ss += e * e;
      }
      s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace ideabench::stats
