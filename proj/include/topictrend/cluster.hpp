#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "topictrend/kernels.hpp"
#include "topictrend/matrix.hpp"

namespace topictrend::cluster {

using kernels::MstEdge;

enum class Selection { leaf, eom };

std::string_view to_string(Metric m);
std::string_view to_string(Selection s);
Metric metric_from_string(std::string_view s);
Selection selection_from_string(std::string_view s);

struct DensityParams {
  int min_cluster_size = 100;
  int min_samples = 10;
  Metric metric = Metric::euclidean;
  Selection selection = Selection::leaf;

  // Throws Error(invalid_argument) unless 2 <= min_cluster_size,
  // 1 <= min_samples <= min_cluster_size.
  void validate() const;
};

// Labels are -1 for outliers and 0..C-1 otherwise, numbered by decreasing
// cluster size with ties going to the cluster holding the smallest row index.
struct ClusterAssignment {
  std::vector<int> labels;
  int cluster_count = 0;

  std::vector<std::size_t> sizes() const;
  std::size_t outliers() const;
};

// Relabels arbitrary integer labels (negative = outlier) into the canonical
// numbering described above.
ClusterAssignment canonicalize(std::span<const int> raw_labels);

// ---- k-means -------------------------------------------------------------

struct KMeansResult {
  ClusterAssignment assignment;
  Matrix centroids;  // row c belongs to label c
  double inertia = 0.0;
  int iterations = 0;
  std::vector<double> inertia_history;  // after every assignment step
};

// k-means++ seeding with Xoshiro256(seed), then Lloyd iterations until the
// largest centroid shift drops below tol or max_iter is reached. An emptied
// cluster is moved onto the point farthest from its centroid.
KMeansResult kmeans(const Matrix& x, int k, std::uint64_t seed, int max_iter = 300, double tol = 1e-6);

// Mean silhouette over non-outlier points. Throws Error(invalid_argument)
// with fewer than two clusters.
double silhouette(const Matrix& x, std::span<const int> labels, Metric metric = Metric::euclidean);

struct KSelection {
  int best_k = 0;
  std::vector<std::pair<int, double>> scores;  // (k, silhouette)
};

// Lowest-inertia result of `restarts` k-means runs. Run 0 uses `seed`, run r
// uses seed + r * 0x9e3779b97f4a7c15; ties keep the earlier run.
KMeansResult kmeans_best_of(const Matrix& x, int k, std::uint64_t seed, int restarts);

// k-means (best of `restarts`, base seed + k) for every k in [k_min, k_max];
// the best silhouette wins, ties to the smaller k.
KSelection select_k(const Matrix& x, int k_min, int k_max, std::uint64_t seed, int restarts = 10);

// ---- density clustering --------------------------------------------------

// Distance to the min_samples-th nearest other point. Throws
// Error(invalid_argument) unless n > min_samples.
std::vector<double> core_distances(const Matrix& x, int min_samples, Metric metric);

inline double mutual_reachability(double core_a, double core_b, double dist) {
  return std::max(core_a, std::max(core_b, dist));
}

// Minimum spanning tree of the mutual-reachability graph (Prim, dense).
std::vector<MstEdge> build_mst(const Matrix& x, std::span<const double> core, Metric metric);

struct CondensedNode {
  int id = 0;
  int parent = -1;  // -1 for the root
  double birth_lambda = 0.0;
  double death_lambda = 0.0;
  std::size_t size = 0;
  double stability = 0.0;
  bool leaf = false;
  bool selected = false;
};

// Nodes are indexed by id; the root is node 0 and covers every point. A
// child always has a larger id than its parent.
struct CondensedTree {
  std::vector<CondensedNode> nodes;
  std::vector<int> point_cluster;      // node each point falls out of
  std::vector<double> point_lambda;    // lambda at which it falls out

  std::vector<int> children(int id) const;
};

struct DensityClustering {
  CondensedTree tree;
  ClusterAssignment assignment;
};

// Builds the single-linkage hierarchy from the MST over n points, condenses
// it at min_cluster_size and selects clusters. The root is never selected,
// so a hierarchy that never splits yields only outliers.
DensityClustering condense_and_extract(std::vector<MstEdge> mst, std::size_t n,
                                       int min_cluster_size, Selection selection);

// core distances -> MST -> condense_and_extract. Fewer points than
// min_cluster_size (or than min_samples + 1) gives all outliers.
DensityClustering density_cluster(const Matrix& x, const DensityParams& params);

// Density-based cluster validity in [-1, 1]. Outliers are left out of the
// per-cluster terms but counted in the weight denominator. Throws
// Error(undefined_validity) unless there are >= 2 clusters of size >= 2.
double dbcv(const Matrix& x, std::span<const int> labels, Metric metric = Metric::euclidean);

}  // namespace topictrend::cluster
