#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "topictrend/cluster.hpp"
#include "topictrend/error.hpp"

namespace topictrend::cluster {

std::vector<double> core_distances(const Matrix& x, int min_samples, Metric metric) {
  if (min_samples < 1 || x.rows() <= static_cast<std::size_t>(min_samples))
    throw Error(Errc::invalid_argument, "core distances need n > min_samples (n=" +
                                            std::to_string(x.rows()) +
                                            ", min_samples=" + std::to_string(min_samples) + ")");
  return kernels::parallel::core_distances(x, min_samples, metric);
}

std::vector<MstEdge> build_mst(const Matrix& x, std::span<const double> core, Metric metric) {
  if (core.size() != x.rows())
    throw Error(Errc::dimension_mismatch, "core distances and rows differ in length");
  return kernels::parallel::mutual_reachability_mst(x, core, metric);
}

std::vector<int> CondensedTree::children(int id) const {
  std::vector<int> out;
  for (const auto& node : nodes) {
    if (node.parent == id) out.push_back(node.id);
  }
  return out;
}

namespace {

struct Dendrogram {
  // Internal node i (id n + i) merges left[i] and right[i] at distance[i].
  std::vector<std::size_t> left, right, size;
  std::vector<double> distance;
};

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t child, std::size_t root) { parent_[find(child)] = find(root); }

 private:
  std::vector<std::size_t> parent_;
};

Dendrogram single_linkage(std::vector<MstEdge> edges, std::size_t n) {
  std::sort(edges.begin(), edges.end(), [](const MstEdge& a, const MstEdge& b) {
    return kernels::edge_less(a.weight, a.a, a.b, b.weight, b.a, b.b);
  });
  Dendrogram dg;
  DisjointSet sets(n);
  std::vector<std::size_t> node_of(n);  // set representative -> dendrogram node
  std::iota(node_of.begin(), node_of.end(), 0);
  auto node_size = [&](std::size_t node) { return node < n ? std::size_t{1} : dg.size[node - n]; };
  for (const auto& e : edges) {
    const std::size_t ra = sets.find(e.a), rb = sets.find(e.b);
    const std::size_t la = node_of[ra], lb = node_of[rb];
    dg.left.push_back(la);
    dg.right.push_back(lb);
    dg.distance.push_back(e.weight);
    dg.size.push_back(node_size(la) + node_size(lb));
    sets.unite(rb, ra);
    node_of[sets.find(ra)] = n + dg.left.size() - 1;
  }
  return dg;
}

double lambda_of(double distance) {
  return distance > 0.0 ? 1.0 / distance : std::numeric_limits<double>::infinity();
}

// lambda - birth, reading inf - inf as 0.
double excess(double lambda, double birth) { return lambda == birth ? 0.0 : lambda - birth; }

}  // namespace

DensityClustering condense_and_extract(std::vector<MstEdge> mst, std::size_t n,
                                       int min_cluster_size, Selection selection) {
  if (min_cluster_size < 2) throw Error(Errc::invalid_argument, "min_cluster_size must be at least 2");
  const auto mcs = static_cast<std::size_t>(min_cluster_size);

  DensityClustering out;
  CondensedTree& tree = out.tree;
  tree.point_cluster.assign(n, 0);
  tree.point_lambda.assign(n, 0.0);
  tree.nodes.push_back({0, -1, 0.0, 0.0, n, 0.0, false, false});

  if (n < mcs || n < 2 || mst.size() + 1 != n) {
    tree.nodes[0].leaf = true;
    out.assignment.labels.assign(n, -1);
    return out;
  }

  const Dendrogram dg = single_linkage(std::move(mst), n);
  auto node_size = [&](std::size_t node) { return node < n ? std::size_t{1} : dg.size[node - n]; };

  std::vector<std::size_t> stack;
  auto fall_out = [&](std::size_t subtree, int cluster, double lambda) {
    stack.assign(1, subtree);
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      if (node < n) {
        tree.point_cluster[node] = cluster;
        tree.point_lambda[node] = lambda;
        auto& c = tree.nodes[static_cast<std::size_t>(cluster)];
        c.stability += excess(lambda, c.birth_lambda);
        c.death_lambda = std::max(c.death_lambda, lambda);
      } else {
        stack.push_back(dg.left[node - n]);
        stack.push_back(dg.right[node - n]);
      }
    }
  };

  // Breadth-first over the dendrogram so cluster ids grow with depth.
  std::vector<std::pair<std::size_t, int>> queue{{2 * n - 2, 0}};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto [node, cluster] = queue[head];
    const std::size_t i = node - n;
    const std::size_t l = dg.left[i], r = dg.right[i];
    const double lambda = lambda_of(dg.distance[i]);
    const bool keep_l = node_size(l) >= mcs, keep_r = node_size(r) >= mcs;

    if (keep_l && keep_r) {
      auto& parent = tree.nodes[static_cast<std::size_t>(cluster)];
      parent.death_lambda = lambda;
      parent.stability += excess(lambda, parent.birth_lambda) * static_cast<double>(node_size(l) + node_size(r));
      for (std::size_t child : {l, r}) {
        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({id, cluster, lambda, lambda, node_size(child), 0.0, false, false});
        queue.emplace_back(child, id);
      }
    } else if (!keep_l && !keep_r) {
      fall_out(l, cluster, lambda);
      fall_out(r, cluster, lambda);
    } else {
      const std::size_t lost = keep_l ? r : l, kept = keep_l ? l : r;
      fall_out(lost, cluster, lambda);
      queue.emplace_back(kept, cluster);
    }
  }

  auto& nodes = tree.nodes;
  std::vector<int> child_count(nodes.size(), 0);
  for (const auto& node : nodes) {
    if (node.parent >= 0) ++child_count[static_cast<std::size_t>(node.parent)];
  }
  for (auto& node : nodes) node.leaf = child_count[static_cast<std::size_t>(node.id)] == 0;

  if (selection == Selection::leaf) {
    for (auto& node : nodes) node.selected = node.leaf && node.parent >= 0;
  } else {
    // Excess of mass: children before parents, which id order guarantees.
    std::vector<double> best(nodes.size(), 0.0);
    for (std::size_t id = nodes.size(); id-- > 1;) {
      auto& node = nodes[id];
      if (node.leaf) {
        node.selected = true;
        best[id] = node.stability;
        continue;
      }
      double subtree = 0.0;
      for (const auto& other : nodes) {
        if (other.parent == node.id) subtree += best[static_cast<std::size_t>(other.id)];
      }
      if (subtree > node.stability) {
        node.selected = false;
        best[id] = subtree;
      } else {
        node.selected = true;
        best[id] = node.stability;
        // Deselect the whole subtree below.
        std::vector<int> pending = tree.children(node.id);
        while (!pending.empty()) {
          const int c = pending.back();
          pending.pop_back();
          nodes[static_cast<std::size_t>(c)].selected = false;
          for (int g : tree.children(c)) pending.push_back(g);
        }
      }
    }
  }

  // Nearest selected ancestor (or self); parents precede children.
  std::vector<int> owner(nodes.size(), -1);
  for (const auto& node : nodes) {
    if (node.selected) {
      owner[static_cast<std::size_t>(node.id)] = node.id;
    } else if (node.parent >= 0) {
      owner[static_cast<std::size_t>(node.id)] = owner[static_cast<std::size_t>(node.parent)];
    }
  }
  std::vector<int> raw(n);
  for (std::size_t p = 0; p < n; ++p) raw[p] = owner[static_cast<std::size_t>(tree.point_cluster[p])];
  out.assignment = canonicalize(raw);
  return out;
}

DensityClustering density_cluster(const Matrix& x, const DensityParams& params) {
  params.validate();
  const std::size_t n = x.rows();
  if (n < static_cast<std::size_t>(params.min_cluster_size) ||
      n <= static_cast<std::size_t>(params.min_samples)) {
    return condense_and_extract({}, n, params.min_cluster_size, params.selection);
  }
  const auto core = core_distances(x, params.min_samples, params.metric);
  auto mst = build_mst(x, core, params.metric);
  return condense_and_extract(std::move(mst), n, params.min_cluster_size, params.selection);
}

}  // namespace topictrend::cluster
