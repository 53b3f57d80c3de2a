#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is deliberately naive: straight loops, no shared code with
// the kernels under test beyond the standard library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ideabench/rng.hpp"

namespace oracles {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double naive_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  return dot(a, b) / (std::sqrt(dot(a, a)) * std::sqrt(dot(b, b)));
}

// Per-human max cosine over every generated row, O(|H|*|G|*d).
inline std::vector<double> brute_force_ngs(const std::vector<std::vector<double>>& human,
                                           const std::vector<std::vector<double>>& generated) {
  std::vector<double> best;
  for (const auto& h : human) {
    double m = -2.0;
    for (const auto& g : generated) {
      double c = naive_cosine(h, g);
      if (c > m) m = c;
    }
    best.push_back(m);
  }
  return best;
}

struct Plane {
  std::array<double, 3> normal;
  double offset;  // dot(normal, x) <= offset for interior points
};

// Face planes recomputed from the hull's triangles and vertex list.
inline std::vector<Plane> face_planes(const std::vector<std::array<double, 3>>& vertices,
                                      const std::vector<std::array<int, 3>>& faces) {
  std::vector<Plane> planes;
  for (const auto& f : faces) {
    const auto& a = vertices[f[0]];
    const auto& b = vertices[f[1]];
    const auto& c = vertices[f[2]];
    std::array<double, 3> u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
    std::array<double, 3> v{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
    std::array<double, 3> n{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
                            u[0] * v[1] - u[1] * v[0]};
    planes.push_back({n, n[0] * a[0] + n[1] * a[1] + n[2] * a[2]});
  }
  return planes;
}

// Monte Carlo volume estimate: sample the bounding box of the hull vertices,
// count samples on the interior side of every face plane.
inline double mc_hull_volume(const std::vector<std::array<double, 3>>& vertices,
                             const std::vector<std::array<int, 3>>& faces, int samples,
                             std::uint64_t seed) {
  if (vertices.empty()) return 0.0;
  std::array<double, 3> lo = vertices[0];
  std::array<double, 3> hi = vertices[0];
  for (const auto& v : vertices) {
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], v[k]);
      hi[k] = std::max(hi[k], v[k]);
    }
  }
  std::vector<Plane> planes = face_planes(vertices, faces);
  double slack = 0.0;
  for (const auto& p : planes) {
    slack = std::max(slack, std::abs(p.offset));
  }
  slack = (slack + 1.0) * 1e-12;
  std::mt19937_64 gen(seed);
  long long inside = 0;
  for (int s = 0; s < samples; ++s) {
    std::array<double, 3> x;
    for (int k = 0; k < 3; ++k) {
      x[k] = lo[k] + (hi[k] - lo[k]) * ideabench::rng::unit_open(gen);
    }
    bool ok = true;
    for (const auto& p : planes) {
      if (p.normal[0] * x[0] + p.normal[1] * x[1] + p.normal[2] * x[2] > p.offset + slack) {
        ok = false;
        break;
      }
    }
    inside += ok;
  }
  double box = (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
  return box * static_cast<double>(inside) / static_cast<double>(samples);
}

// Leading eigenpair by power iteration on a symmetric matrix.
inline std::pair<double, std::vector<double>> power_eig(std::vector<std::vector<double>> a,
                                                        std::uint64_t seed, int iters = 200000) {
  std::size_t n = a.size();
  std::mt19937_64 gen(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = ideabench::rng::standard_normal(gen);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) w[i] += a[i][j] * v[j];
    }
    double norm = std::sqrt(dot(w, w));
    if (norm == 0.0) return {0.0, v};  // v already in the null space
    for (auto& x : w) x /= norm;
    v = w;
  }
  std::vector<double> av(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) av[i] += a[i][j] * v[j];
  }
  lambda = dot(v, av);
  return {lambda, v};
}

// All eigenvalues (descending magnitude then sorted descending) by repeated
// power iteration with deflation: A <- A - lambda v v^T.
inline std::vector<double> power_iteration_eigenvalues(std::vector<std::vector<double>> a,
                                                       std::uint64_t seed) {
  std::size_t n = a.size();
  std::vector<double> values;
  for (std::size_t k = 0; k < n; ++k) {
    auto [lambda, v] = power_eig(a, seed + k);
    values.push_back(lambda);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) a[i][j] -= lambda * v[i] * v[j];
    }
  }
  std::sort(values.begin(), values.end(), std::greater<double>());
  return values;
}

inline std::pair<double, double> naive_mean_sample_sd(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

inline double naive_kappa(const std::vector<int>& a, const std::vector<int>& b) {
  double n = static_cast<double>(a.size());
  double po = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) po += a[i] == b[i];
  po /= n;
  double pe = 0.0;
  for (int c = -10; c <= 10; ++c) {
    double ca = 0.0;
    double cb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ca += a[i] == c;
      cb += b[i] == c;
    }
    pe += (ca / n) * (cb / n);
  }
  if (pe >= 1.0) return po >= 1.0 ? 1.0 : 0.0;
  return (po - pe) / (1.0 - pe);
}

}  // namespace oracles
