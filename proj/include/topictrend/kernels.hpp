#pragma once

// Hot loops of the pipeline. Each kernel exists twice: a plain serial
// reference and an OpenMP version. The two are required to produce
// bit-identical results; tests and bench/ compare them directly.

#include <cstddef>
#include <span>
#include <vector>

#include "topictrend/matrix.hpp"

namespace topictrend {

enum class Metric { euclidean, cosine };

namespace kernels {

struct MstEdge {
  std::size_t a = 0;  // a < b
  std::size_t b = 0;
  double weight = 0.0;

  friend bool operator==(const MstEdge&, const MstEdge&) = default;
};

// Strict total order used for every tie-break on edges: weight, then the
// (smaller, larger) endpoint pair.
inline bool edge_less(double w1, std::size_t a1, std::size_t b1, double w2, std::size_t a2,
                      std::size_t b2) {
  if (w1 != w2) return w1 < w2;
  if (a1 != a2) return a1 < a2;
  return b1 < b2;
}

// Distance between rows of one matrix. Cosine distance is 1 - cos(a, b) with
// cos taken as 0 when either vector has zero norm.
class RowDistance {
 public:
  RowDistance(const Matrix& x, Metric metric);
  double operator()(std::size_t i, std::size_t j) const;

 private:
  const Matrix& x_;
  Metric metric_;
  std::vector<double> norms_;
};

double euclidean(std::span<const double> a, std::span<const double> b);
double squared_euclidean(std::span<const double> a, std::span<const double> b);

namespace serial {

std::vector<double> core_distances(const Matrix& x, int min_samples, Metric metric);

// Prim's algorithm on the implicit dense mutual-reachability graph, started
// at vertex 0. Edges come back in insertion order.
std::vector<MstEdge> mutual_reachability_mst(const Matrix& x, std::span<const double> core,
                                             Metric metric);

// Per-point silhouette. Points labelled < 0 are skipped (value NaN) and do
// not enter any mean.
std::vector<double> silhouette_values(const Matrix& x, std::span<const int> labels,
                                      int cluster_count, Metric metric);

// Sample covariance (divisor n - 1) of already centred rows.
Matrix covariance(const Matrix& centred);

// (x - mean) * basis, basis being d x k.
Matrix project(const Matrix& x, std::span<const double> mean, const Matrix& basis);

// Index of the nearest centroid (squared Euclidean, ties to the lower index);
// the squared distance is written to `dist2`.
std::vector<int> assign_nearest(const Matrix& x, const Matrix& centroids,
                                std::vector<double>& dist2);

}  // namespace serial

namespace parallel {

std::vector<double> core_distances(const Matrix& x, int min_samples, Metric metric);
std::vector<MstEdge> mutual_reachability_mst(const Matrix& x, std::span<const double> core,
                                             Metric metric);
std::vector<double> silhouette_values(const Matrix& x, std::span<const int> labels,
                                      int cluster_count, Metric metric);
Matrix covariance(const Matrix& centred);
Matrix project(const Matrix& x, std::span<const double> mean, const Matrix& basis);
std::vector<int> assign_nearest(const Matrix& x, const Matrix& centroids,
                                std::vector<double>& dist2);

}  // namespace parallel

// Caps the OpenMP worker count (0 = runtime default).
void set_thread_count(int threads);
int thread_count();

}  // namespace kernels
}  // namespace topictrend
