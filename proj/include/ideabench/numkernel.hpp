#pragma once

#include <array>
#include <span>
#include <vector>

namespace ideabench::numkernel {

// dot(a,b)/(|a||b|), clamped to [-1,1]. Zero-norm input is a domain error.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Eigensystem of a real symmetric matrix, eigenpairs sorted by descending
// eigenvalue. Exposed so tests can target the solver directly.
struct EigenDecomposition {
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> eigenvectors;  // eigenvectors[i] pairs with eigenvalues[i]
};

// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops to tol.
EigenDecomposition jacobi_eigen_symmetric(const std::vector<std::vector<double>>& matrix,
                                          double tol = 1e-10, int max_sweeps = 100);

struct PcaModel {
  std::vector<double> mean;
  std::vector<std::vector<double>> components;  // k orthonormal rows of dim d
  std::vector<double> explained_variance;       // descending, one per component
  double total_variance = 0.0;                  // trace of the sample covariance
};

// Sample covariance (divisor n-1), Jacobi eigendecomposition, top-k components.
// Sign convention: each component's largest-magnitude entry is positive.
PcaModel pca_fit(const std::vector<std::vector<double>>& rows, int k = 3);

// (row - mean) projected onto each component; returns n rows of k coordinates.
std::vector<std::vector<double>> pca_project(const PcaModel& model,
                                             const std::vector<std::vector<double>>& rows);

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Point3&) const = default;
};

struct Hull3 {
  std::vector<Point3> vertices;
  std::vector<std::array<int, 3>> faces;  // outward-oriented triangles into vertices
  double volume = 0.0;
  bool degenerate = false;  // coincident/collinear/coplanar input; volume forced to 0
};

// Quickhull. Degeneracy tolerance is 1e-9 relative to the bounding-box
// diagonal; volume is the sum of signed tetrahedra from an interior point.
Hull3 convex_hull_volume_3d(std::span<const Point3> points);

}  // namespace ideabench::numkernel
