#include "ideabench/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <utility>

#include "ideabench/errors.hpp"

namespace ideabench::numkernel {

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DomainError("cosine: dimension mismatch, " + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()));
  }
  if (a.empty()) throw DomainError("cosine: empty vectors");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw DomainError("cosine: zero-norm vector");
  double v = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(v, -1.0, 1.0);
}

namespace {

double off_diagonal_norm(const std::vector<std::vector<double>>& a) {
  double sum = 0.0;
  std::size_t n = a.size();
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p != q) sum += a[p][q] * a[p][q];
    }
  }
  return std::sqrt(sum);
}

}  // namespace

EigenDecomposition jacobi_eigen_symmetric(const std::vector<std::vector<double>>& matrix,
                                          double tol, int max_sweeps) {
  std::size_t n = matrix.size();
  if (n == 0) throw DomainError("jacobi: empty matrix");
  for (const auto& row : matrix) {
    if (row.size() != n) throw DomainError("jacobi: matrix is not square");
  }
  std::vector<std::vector<double>> a = matrix;
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

  bool converged = n < 2 || off_diagonal_norm(a) <= tol;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = a[p][q];
        if (apq == 0.0) continue;
        double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          double aip = a[i][p], aiq = a[i][q];
          a[i][p] = c * aip - s * aiq;
          a[i][q] = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          double api = a[p][i], aqi = a[q][i];
          a[p][i] = c * api - s * aqi;
          a[q][i] = s * api + c * aqi;
        }
        for (std::size_t i = 0; i < n; ++i) {
          double vip = v[i][p], viq = v[i][q];
          v[i][p] = c * vip - s * viq;
          v[i][q] = s * vip + c * viq;
        }
      }
    }
    converged = off_diagonal_norm(a) <= tol;
  }
  if (!converged) {
    throw NumericError("jacobi: no convergence after " + std::to_string(max_sweeps) + " sweeps");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a[i][i] > a[j][j]; });
  EigenDecomposition out;
  out.eigenvalues.reserve(n);
  out.eigenvectors.reserve(n);
  for (std::size_t idx : order) {
    out.eigenvalues.push_back(a[idx][idx]);
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = v[i][idx];
    out.eigenvectors.push_back(std::move(col));
  }
  return out;
}

PcaModel pca_fit(const std::vector<std::vector<double>>& rows, int k) {
  std::size_t n = rows.size();
  if (n < 2) throw DomainError("pca_fit: needs at least 2 rows, got " + std::to_string(n));
  std::size_t d = rows[0].size();
  if (d == 0) throw DomainError("pca_fit: zero-dimensional rows");
  for (const auto& row : rows) {
    if (row.size() != d) throw DomainError("pca_fit: inconsistent row dimensions");
  }
  if (k <= 0 || static_cast<std::size_t>(k) > std::min(n - 1, d)) {
    throw DomainError("pca_fit: k=" + std::to_string(k) + " out of range for " +
                      std::to_string(n) + "x" + std::to_string(d) + " data");
  }

  std::vector<double> mean(d, 0.0);
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += row[j];
  }
  for (double& m : mean) m /= static_cast<double>(n);

  std::vector<std::vector<double>> centered(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) centered[i][j] = rows[i][j] - mean[j];
  }

  std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < d; ++p) {
      double cp = centered[i][p];
      if (cp == 0.0) continue;
      for (std::size_t q = p; q < d; ++q) cov[p][q] += cp * centered[i][q];
    }
  }
  double divisor = static_cast<double>(n - 1);
  for (std::size_t p = 0; p < d; ++p) {
    for (std::size_t q = p; q < d; ++q) {
      cov[p][q] /= divisor;
      cov[q][p] = cov[p][q];
    }
  }

  double trace = 0.0;
  for (std::size_t p = 0; p < d; ++p) trace += cov[p][p];

  EigenDecomposition eig = jacobi_eigen_symmetric(cov);

  PcaModel model;
  model.mean = std::move(mean);
  model.total_variance = trace;
  for (int c = 0; c < k; ++c) {
    double lambda = std::max(0.0, eig.eigenvalues[static_cast<std::size_t>(c)]);
    std::vector<double> comp = eig.eigenvectors[static_cast<std::size_t>(c)];
    std::size_t imax = 0;
    for (std::size_t j = 1; j < d; ++j) {
      if (std::abs(comp[j]) > std::abs(comp[imax])) imax = j;
    }
    if (comp[imax] < 0.0) {
      for (double& x : comp) x = -x;
    }
    model.explained_variance.push_back(lambda);
    model.components.push_back(std::move(comp));
  }
  return model;
}

std::vector<std::vector<double>> pca_project(const PcaModel& model,
                                             const std::vector<std::vector<double>>& rows) {
  std::size_t d = model.mean.size();
  std::size_t k = model.components.size();
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.size() != d) {
      throw DomainError("pca_project: row dim " + std::to_string(row.size()) +
                        " does not match model dim " + std::to_string(d));
    }
    std::vector<double> proj(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
      const std::vector<double>& comp = model.components[c];
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) acc += (row[j] - model.mean[j]) * comp[j];
      proj[c] = acc;
    }
    out.push_back(std::move(proj));
  }
  return out;
}

namespace {

struct V3 {
  double x, y, z;
};

V3 sub(const Point3& a, const Point3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
V3 sub(const V3& a, const V3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
double dot(const V3& a, const V3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
V3 cross(const V3& a, const V3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
double norm(const V3& a) { return std::sqrt(dot(a, a)); }
V3 as_vec(const Point3& p) { return {p.x, p.y, p.z}; }

struct Face {
  std::array<int, 3> v;
  V3 normal;      // unit length, outward
  double offset;  // dot(normal, vertex)
  bool alive = true;
  std::vector<int> outside;  // indices of points beyond this face
};

double signed_dist(const Face& f, const V3& p) { return dot(f.normal, p) - f.offset; }

// Plane through vertices a,b,c oriented away from `interior`.
Face make_face(const std::vector<V3>& pts, int a, int b, int c, const V3& interior) {
  Face f;
  f.v = {a, b, c};
  V3 n = cross(sub(pts[static_cast<std::size_t>(b)], pts[static_cast<std::size_t>(a)]),
               sub(pts[static_cast<std::size_t>(c)], pts[static_cast<std::size_t>(a)]));
  double len = norm(n);
  if (len == 0.0) {
    // Degenerate sliver; keep a zero normal, it can never see any point.
    f.normal = {0.0, 0.0, 0.0};
    f.offset = 0.0;
    return f;
  }
  f.normal = {n.x / len, n.y / len, n.z / len};
  f.offset = dot(f.normal, pts[static_cast<std::size_t>(a)]);
  if (signed_dist(f, interior) > 0.0) {
    std::swap(f.v[1], f.v[2]);
    f.normal = {-f.normal.x, -f.normal.y, -f.normal.z};
    f.offset = -f.offset;
  }
  return f;
}

Hull3 degenerate_hull(std::vector<Point3> vertices) {
  Hull3 hull;
  hull.vertices = std::move(vertices);
  hull.volume = 0.0;
  hull.degenerate = true;
  return hull;
}

}  // namespace

Hull3 convex_hull_volume_3d(std::span<const Point3> points) {
  if (points.empty()) throw DomainError("convex hull: no points");
  std::vector<V3> pts;
  pts.reserve(points.size());
  for (const Point3& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw DomainError("convex hull: non-finite coordinate");
    }
    pts.push_back(as_vec(p));
  }
  int n = static_cast<int>(pts.size());

  V3 lo = pts[0], hi = pts[0];
  for (const V3& p : pts) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  double diag = norm(sub(hi, lo));
  double eps = 1e-9 * diag;
  if (diag == 0.0) return degenerate_hull({points[0]});

  // Initial simplex: farthest pair among axis extremes, then the point
  // farthest from their line, then the point farthest from that plane.
  std::vector<int> extremes;
  for (int axis = 0; axis < 3; ++axis) {
    int imin = 0, imax = 0;
    for (int i = 1; i < n; ++i) {
      double v = axis == 0 ? pts[static_cast<std::size_t>(i)].x
               : axis == 1 ? pts[static_cast<std::size_t>(i)].y
                           : pts[static_cast<std::size_t>(i)].z;
      double vmin = axis == 0 ? pts[static_cast<std::size_t>(imin)].x
                  : axis == 1 ? pts[static_cast<std::size_t>(imin)].y
                              : pts[static_cast<std::size_t>(imin)].z;
      double vmax = axis == 0 ? pts[static_cast<std::size_t>(imax)].x
                  : axis == 1 ? pts[static_cast<std::size_t>(imax)].y
                              : pts[static_cast<std::size_t>(imax)].z;
      if (v < vmin) imin = i;
      if (v > vmax) imax = i;
    }
    extremes.push_back(imin);
    extremes.push_back(imax);
  }
  int i0 = extremes[0], i1 = extremes[1];
  double best = -1.0;
  for (int a : extremes) {
    for (int b : extremes) {
      double d = norm(sub(pts[static_cast<std::size_t>(a)], pts[static_cast<std::size_t>(b)]));
      if (d > best) {
        best = d;
        i0 = a;
        i1 = b;
      }
    }
  }
  if (best <= eps) return degenerate_hull({points[static_cast<std::size_t>(i0)]});

  V3 dir = sub(pts[static_cast<std::size_t>(i1)], pts[static_cast<std::size_t>(i0)]);
  double dir_len = norm(dir);
  int i2 = -1;
  best = eps;
  for (int i = 0; i < n; ++i) {
    if (i == i0 || i == i1) continue;
    V3 rel = sub(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(i0)]);
    double d = norm(cross(dir, rel)) / dir_len;  // distance to the i0-i1 line
    if (d > best) {
      best = d;
      i2 = i;
    }
  }
  if (i2 < 0) {
    return degenerate_hull(
        {points[static_cast<std::size_t>(i0)], points[static_cast<std::size_t>(i1)]});
  }

  V3 plane_n = cross(dir, sub(pts[static_cast<std::size_t>(i2)], pts[static_cast<std::size_t>(i0)]));
  double plane_len = norm(plane_n);
  int i3 = -1;
  best = eps;
  for (int i = 0; i < n; ++i) {
    if (i == i0 || i == i1 || i == i2) continue;
    double d = std::abs(dot(plane_n, sub(pts[static_cast<std::size_t>(i)],
                                         pts[static_cast<std::size_t>(i0)]))) /
               plane_len;
    if (d > best) {
      best = d;
      i3 = i;
    }
  }
  if (i3 < 0) {
    return degenerate_hull({points[static_cast<std::size_t>(i0)],
                            points[static_cast<std::size_t>(i1)],
                            points[static_cast<std::size_t>(i2)]});
  }

  V3 interior = {
      (pts[static_cast<std::size_t>(i0)].x + pts[static_cast<std::size_t>(i1)].x +
       pts[static_cast<std::size_t>(i2)].x + pts[static_cast<std::size_t>(i3)].x) / 4.0,
      (pts[static_cast<std::size_t>(i0)].y + pts[static_cast<std::size_t>(i1)].y +
       pts[static_cast<std::size_t>(i2)].y + pts[static_cast<std::size_t>(i3)].y) / 4.0,
      (pts[static_cast<std::size_t>(i0)].z + pts[static_cast<std::size_t>(i1)].z +
       pts[static_cast<std::size_t>(i2)].z + pts[static_cast<std::size_t>(i3)].z) / 4.0};

  std::vector<Face> faces;
  faces.push_back(make_face(pts, i0, i1, i2, interior));
  faces.push_back(make_face(pts, i0, i1, i3, interior));
  faces.push_back(make_face(pts, i0, i2, i3, interior));
  faces.push_back(make_face(pts, i1, i2, i3, interior));

  // Conflict lists: each point goes to the face it is farthest beyond.
  auto assign_points = [&](const std::vector<int>& candidates, std::vector<std::size_t> targets) {
    for (int i : candidates) {
      double best_d = eps;
      std::size_t best_f = SIZE_MAX;
      for (std::size_t fi : targets) {
        if (!faces[fi].alive) continue;
        double d = signed_dist(faces[fi], pts[static_cast<std::size_t>(i)]);
        if (d > best_d) {
          best_d = d;
          best_f = fi;
        }
      }
      if (best_f != SIZE_MAX) faces[best_f].outside.push_back(i);
    }
  };
  std::vector<int> initial;
  for (int i = 0; i < n; ++i) {
    if (i != i0 && i != i1 && i != i2 && i != i3) initial.push_back(i);
  }
  assign_points(initial, {0, 1, 2, 3});

  for (;;) {
    std::size_t active = SIZE_MAX;
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
      if (faces[fi].alive && !faces[fi].outside.empty()) {
        active = fi;
        break;
      }
    }
    if (active == SIZE_MAX) break;

    int apex = faces[active].outside[0];
    double apex_d = signed_dist(faces[active], pts[static_cast<std::size_t>(apex)]);
    for (int i : faces[active].outside) {
      double d = signed_dist(faces[active], pts[static_cast<std::size_t>(i)]);
      if (d > apex_d) {
        apex_d = d;
        apex = i;
      }
    }

    // Every alive face the apex can see gets retired; its orphaned points are
    // re-homed onto the replacement cone afterwards.
    std::vector<std::size_t> visible;
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
      if (faces[fi].alive &&
          signed_dist(faces[fi], pts[static_cast<std::size_t>(apex)]) > eps) {
        visible.push_back(fi);
      }
    }

    std::set<std::pair<int, int>> visible_edges;
    for (std::size_t fi : visible) {
      const auto& fv = faces[fi].v;
      visible_edges.insert({fv[0], fv[1]});
      visible_edges.insert({fv[1], fv[2]});
      visible_edges.insert({fv[2], fv[0]});
    }
    std::vector<std::pair<int, int>> horizon;
    for (const auto& e : visible_edges) {
      if (!visible_edges.count({e.second, e.first})) horizon.push_back(e);
    }

    std::vector<int> orphans;
    for (std::size_t fi : visible) {
      faces[fi].alive = false;
      for (int i : faces[fi].outside) {
        if (i != apex) orphans.push_back(i);
      }
      faces[fi].outside.clear();
    }

    std::vector<std::size_t> created;
    for (const auto& [u, w] : horizon) {
      created.push_back(faces.size());
      faces.push_back(make_face(pts, u, w, apex, interior));
    }
    assign_points(orphans, created);
  }

  // Compact surviving faces; remap vertex indices onto the output vertex list.
  Hull3 hull;
  std::vector<int> remap(static_cast<std::size_t>(n), -1);
  for (const Face& f : faces) {
    if (!f.alive) continue;
    std::array<int, 3> tri{};
    for (int c = 0; c < 3; ++c) {
      int src = f.v[static_cast<std::size_t>(c)];
      if (remap[static_cast<std::size_t>(src)] < 0) {
        remap[static_cast<std::size_t>(src)] = static_cast<int>(hull.vertices.size());
        hull.vertices.push_back(points[static_cast<std::size_t>(src)]);
      }
      tri[static_cast<std::size_t>(c)] = remap[static_cast<std::size_t>(src)];
    }
    hull.faces.push_back(tri);
  }

  V3 ref = {0.0, 0.0, 0.0};
  for (const Point3& p : hull.vertices) {
    ref.x += p.x;
    ref.y += p.y;
    ref.z += p.z;
  }
  double m = static_cast<double>(hull.vertices.size());
  ref = {ref.x / m, ref.y / m, ref.z / m};
  double volume = 0.0;
  for (const auto& tri : hull.faces) {
    V3 a = sub(as_vec(hull.vertices[static_cast<std::size_t>(tri[0])]), ref);
    V3 b = sub(as_vec(hull.vertices[static_cast<std::size_t>(tri[1])]), ref);
    V3 c = sub(as_vec(hull.vertices[static_cast<std::size_t>(tri[2])]), ref);
    volume += dot(a, cross(b, c)) / 6.0;
  }
  hull.volume = std::max(0.0, volume);
  hull.degenerate = false;
  return hull;
}

}  // namespace ideabench::numkernel
