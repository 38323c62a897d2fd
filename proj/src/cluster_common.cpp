#include <algorithm>
#include <map>
#include <numeric>

#include "topictrend/cluster.hpp"
#include "topictrend/error.hpp"

namespace topictrend::cluster {

std::string_view to_string(Metric m) { return m == Metric::euclidean ? "euclidean" : "cosine"; }
std::string_view to_string(Selection s) { return s == Selection::leaf ? "leaf" : "eom"; }

Metric metric_from_string(std::string_view s) {
  if (s == "euclidean") return Metric::euclidean;
  if (s == "cosine") return Metric::cosine;
  throw Error(Errc::invalid_argument, "unknown metric '" + std::string(s) + "'");
}

Selection selection_from_string(std::string_view s) {
  if (s == "leaf") return Selection::leaf;
  if (s == "eom") return Selection::eom;
  throw Error(Errc::invalid_argument, "unknown cluster selection '" + std::string(s) + "'");
}

void DensityParams::validate() const {
  if (min_cluster_size < 2)
    throw Error(Errc::invalid_argument, "min_cluster_size must be at least 2");
  if (min_samples < 1 || min_samples > min_cluster_size)
    throw Error(Errc::invalid_argument, "min_samples must be in [1, min_cluster_size]");
}

std::vector<std::size_t> ClusterAssignment::sizes() const {
  std::vector<std::size_t> s(static_cast<std::size_t>(cluster_count), 0);
  for (int l : labels) {
    if (l >= 0) ++s[static_cast<std::size_t>(l)];
  }
  return s;
}

std::size_t ClusterAssignment::outliers() const {
  return static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](int l) { return l < 0; }));
}

ClusterAssignment canonicalize(std::span<const int> raw_labels) {
  struct Group {
    int raw;
    std::size_t size = 0;
    std::size_t first = 0;
  };
  std::map<int, Group> groups;
  for (std::size_t i = 0; i < raw_labels.size(); ++i) {
    const int l = raw_labels[i];
    if (l < 0) continue;
    auto [it, inserted] = groups.try_emplace(l, Group{l, 0, i});
    ++it->second.size;
  }
  std::vector<Group> order;
  for (const auto& [raw, g] : groups) order.push_back(g);
  std::sort(order.begin(), order.end(), [](const Group& a, const Group& b) {
    if (a.size != b.size) return a.size > b.size;
    return a.first < b.first;
  });
  std::map<int, int> remap;
  for (std::size_t c = 0; c < order.size(); ++c) remap[order[c].raw] = static_cast<int>(c);

  ClusterAssignment out;
  out.cluster_count = static_cast<int>(order.size());
  out.labels.resize(raw_labels.size());
  for (std::size_t i = 0; i < raw_labels.size(); ++i)
    out.labels[i] = raw_labels[i] < 0 ? -1 : remap[raw_labels[i]];
  return out;
}

double silhouette(const Matrix& x, std::span<const int> labels, Metric metric) {
  if (labels.size() != x.rows())
    throw Error(Errc::dimension_mismatch, "silhouette: labels and rows differ in length");
  // Dense relabelling; the numbering does not affect the score.
  const auto canon = canonicalize(labels);
  if (canon.cluster_count < 2)
    throw Error(Errc::invalid_argument, "silhouette needs at least two clusters");
  const auto values =
      kernels::parallel::silhouette_values(x, canon.labels, canon.cluster_count, metric);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (canon.labels[i] < 0) continue;
    sum += values[i];
    ++count;
  }
  return sum / static_cast<double>(count);
}

}  // namespace topictrend::cluster
