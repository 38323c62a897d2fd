#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "topictrend/cluster.hpp"
#include "topictrend/error.hpp"

namespace topictrend::cluster {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// All-points core distance of every member of one cluster:
//   ( sum_j (1/d(i,j))^dim / (m-1) )^(-1/dim)
// evaluated in log space so high dimensions do not overflow.
std::vector<double> all_points_core(const kernels::RowDistance& dist,
                                    const std::vector<std::size_t>& members, double dim) {
  const auto m = static_cast<std::ptrdiff_t>(members.size());
  std::vector<double> core(members.size());
#pragma omp parallel
  {
    std::vector<double> logs(members.size());
#pragma omp for schedule(dynamic, 8)
    for (std::ptrdiff_t a = 0; a < m; ++a) {
      std::size_t count = 0;
      bool coincident = false;
      double top = -kInf;
      for (std::ptrdiff_t b = 0; b < m; ++b) {
        if (a == b) continue;
        const double d = dist(members[static_cast<std::size_t>(a)], members[static_cast<std::size_t>(b)]);
        if (d == 0.0) {
          coincident = true;
          break;
        }
        const double l = -dim * std::log(d);
        logs[count++] = l;
        top = std::max(top, l);
      }
      if (coincident) {
        core[static_cast<std::size_t>(a)] = 0.0;
        continue;
      }
      double s = 0.0;
      for (std::size_t t = 0; t < count; ++t) s += std::exp(logs[t] - top);
      const double log_mean = top + std::log(s) - std::log(static_cast<double>(count));
      core[static_cast<std::size_t>(a)] = std::exp(-log_mean / dim);
    }
  }
  return core;
}

struct ClusterShape {
  std::vector<std::size_t> internal;  // row indices of internal MST nodes
  double sparseness = 0.0;            // largest internal MST edge
};

ClusterShape cluster_shape(const kernels::RowDistance& dist, const std::vector<std::size_t>& members,
                           const std::vector<double>& core) {
  const std::size_t m = members.size();
  // Prim over the cluster's mutual-reachability graph. Weights tie often
  // (an edge weight is frequently just a core distance), so edges compare by
  // (weight, lower row, higher row) to make the tree unique.
  std::vector<bool> in_tree(m, false);
  std::vector<double> best(m, kInf);
  std::vector<std::size_t> via(m, 0);
  std::vector<std::size_t> degree(m, 0);
  struct Edge {
    std::size_t a, b;
    double w;
  };
  auto less = [&](double w1, std::size_t u1, std::size_t v1, double w2, std::size_t u2, std::size_t v2) {
    return kernels::edge_less(w1, std::min(u1, v1), std::max(u1, v1), w2, std::min(u2, v2),
                              std::max(u2, v2));
  };
  std::vector<Edge> edges;
  std::size_t current = 0;
  in_tree[0] = true;
  for (std::size_t step = 1; step < m; ++step) {
    for (std::size_t v = 0; v < m; ++v) {
      if (in_tree[v]) continue;
      const double w = mutual_reachability(core[current], core[v], dist(members[current], members[v]));
      if (best[v] == kInf || less(w, current, v, best[v], via[v], v)) {
        best[v] = w;
        via[v] = current;
      }
    }
    std::size_t pick = m;
    for (std::size_t v = 0; v < m; ++v) {
      if (in_tree[v]) continue;
      if (pick == m || less(best[v], via[v], v, best[pick], via[pick], pick)) pick = v;
    }
    edges.push_back({via[pick], pick, best[pick]});
    ++degree[via[pick]];
    ++degree[pick];
    in_tree[pick] = true;
    current = pick;
  }

  ClusterShape shape;
  std::vector<bool> internal(m, false);
  for (std::size_t v = 0; v < m; ++v) internal[v] = degree[v] > 1;
  // Two-point clusters have no internal node; then every node counts.
  if (std::none_of(internal.begin(), internal.end(), [](bool b) { return b; }))
    std::fill(internal.begin(), internal.end(), true);
  for (std::size_t v = 0; v < m; ++v) {
    if (internal[v]) shape.internal.push_back(v);
  }
  bool any_internal_edge = false;
  for (const auto& e : edges) {
    if (internal[e.a] && internal[e.b]) {
      shape.sparseness = std::max(shape.sparseness, e.w);
      any_internal_edge = true;
    }
  }
  if (!any_internal_edge) {
    for (const auto& e : edges) shape.sparseness = std::max(shape.sparseness, e.w);
  }
  return shape;
}

}  // namespace

double dbcv(const Matrix& x, std::span<const int> labels, Metric metric) {
  if (labels.size() != x.rows())
    throw Error(Errc::dimension_mismatch, "dbcv: labels and rows differ in length");
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0) groups[labels[i]].push_back(i);
  }
  if (groups.size() < 2) throw Error(Errc::undefined_validity, "undefined validity: fewer than two clusters");
  for (const auto& [label, members] : groups) {
    if (members.size() < 2)
      throw Error(Errc::undefined_validity, "undefined validity: cluster of size 1");
  }

  const kernels::RowDistance dist(x, metric);
  const double dim = static_cast<double>(x.cols());
  std::vector<std::vector<std::size_t>> members;
  std::vector<std::vector<double>> cores;
  std::vector<ClusterShape> shapes;
  for (auto& [label, rows] : groups) {
    members.push_back(rows);
    cores.push_back(all_points_core(dist, rows, dim));
    shapes.push_back(cluster_shape(dist, rows, cores.back()));
  }

  const std::size_t c = members.size();
  std::vector<double> separation(c, kInf);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = i + 1; j < c; ++j) {
      const auto& ii = shapes[i].internal;
      const auto& jj = shapes[j].internal;
      double best = kInf;
      const auto count = static_cast<std::ptrdiff_t>(ii.size());
#pragma omp parallel for reduction(min : best) schedule(dynamic, 8)
      for (std::ptrdiff_t a = 0; a < count; ++a) {
        const std::size_t pa = ii[static_cast<std::size_t>(a)];
        for (std::size_t pb : jj) {
          const double w = mutual_reachability(cores[i][pa], cores[j][pb],
                                               dist(members[i][pa], members[j][pb]));
          best = std::min(best, w);
        }
      }
      separation[i] = std::min(separation[i], best);
      separation[j] = std::min(separation[j], best);
    }
  }

  double score = 0.0;
  const auto total = static_cast<double>(labels.size());
  for (std::size_t i = 0; i < c; ++i) {
    const double sep = separation[i], sparse = shapes[i].sparseness;
    const double denom = std::max(sep, sparse);
    const double validity = denom > 0.0 ? (sep - sparse) / denom : 0.0;
    score += static_cast<double>(members[i].size()) / total * validity;
  }
  return score;
}

}  // namespace topictrend::cluster
