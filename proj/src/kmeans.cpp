#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "topictrend/cluster.hpp"
#include "topictrend/error.hpp"
#include "topictrend/rng.hpp"

namespace topictrend::cluster {

namespace {

Matrix plus_plus_seeds(const Matrix& x, std::size_t k, Xoshiro256& rng) {
  const std::size_t n = x.rows();
  Matrix centroids(k, x.cols());
  std::vector<bool> chosen(n, false);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());

  std::size_t pick = static_cast<std::size_t>(rng.below(n));
  for (std::size_t c = 0; c < k; ++c) {
    if (c > 0) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) total += d2[i];
      if (total <= 0.0) {
        // Every remaining point coincides with a centre: take the first unused.
        pick = 0;
        while (chosen[pick]) ++pick;
      } else {
        const double r = rng.uniform() * total;
        double acc = 0.0;
        pick = n;
        for (std::size_t i = 0; i < n; ++i) {
          if (d2[i] <= 0.0) continue;
          acc += d2[i];
          if (acc > r) {
            pick = i;
            break;
          }
        }
        if (pick == n) {
          // Rounding left r at the very top; fall back to the last candidate.
          for (std::size_t i = n; i-- > 0;) {
            if (d2[i] > 0.0) {
              pick = i;
              break;
            }
          }
        }
      }
    }
    chosen[pick] = true;
    auto src = x.row(pick);
    std::copy(src.begin(), src.end(), centroids.row(c).begin());
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], kernels::squared_euclidean(x.row(i), centroids.row(c)));
  }
  return centroids;
}

}  // namespace

KMeansResult kmeans(const Matrix& x, int k, std::uint64_t seed, int max_iter, double tol) {
  const std::size_t n = x.rows(), d = x.cols();
  if (k <= 0 || static_cast<std::size_t>(k) > n)
    throw Error(Errc::invalid_argument, "k-means needs 1 <= k <= n (k=" + std::to_string(k) +
                                            ", n=" + std::to_string(n) + ")");
  const auto kk = static_cast<std::size_t>(k);
  Xoshiro256 rng(seed);
  Matrix centroids = plus_plus_seeds(x, kk, rng);

  KMeansResult result;
  std::vector<double> dist2;
  std::vector<int> labels;
  for (int iter = 0; iter < max_iter; ++iter) {
    labels = kernels::parallel::assign_nearest(x, centroids, dist2);
    result.inertia_history.push_back(std::accumulate(dist2.begin(), dist2.end(), 0.0));
    result.iterations = iter + 1;

    Matrix next(kk, d);
    std::vector<std::size_t> counts(kk, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(labels[i]);
      ++counts[c];
      auto dst = next.row(c);
      auto src = x.row(i);
      for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
    }
    for (std::size_t c = 0; c < kk; ++c) {
      if (counts[c] == 0) {
        std::size_t far = 0;
        for (std::size_t i = 1; i < n; ++i) {
          if (dist2[i] > dist2[far]) far = i;
        }
        auto src = x.row(far);
        std::copy(src.begin(), src.end(), next.row(c).begin());
        dist2[far] = 0.0;
        continue;
      }
      for (double& v : next.row(c)) v /= static_cast<double>(counts[c]);
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < kk; ++c)
      shift = std::max(shift, kernels::euclidean(centroids.row(c), next.row(c)));
    centroids = std::move(next);
    if (shift < tol) break;
  }

  labels = kernels::parallel::assign_nearest(x, centroids, dist2);
  result.inertia = std::accumulate(dist2.begin(), dist2.end(), 0.0);
  result.inertia_history.push_back(result.inertia);

  // Renumber by size and carry the centroids along. Clusters left empty by
  // the final assignment keep trailing ids.
  result.assignment = canonicalize(labels);
  std::vector<int> order(kk, -1);
  for (std::size_t i = 0; i < n; ++i) order[static_cast<std::size_t>(labels[i])] = result.assignment.labels[i];
  int next_id = result.assignment.cluster_count;
  for (auto& o : order) {
    if (o < 0) o = next_id++;
  }
  result.assignment.cluster_count = next_id;
  result.centroids = Matrix(kk, d);
  for (std::size_t c = 0; c < kk; ++c) {
    auto src = centroids.row(c);
    std::copy(src.begin(), src.end(), result.centroids.row(static_cast<std::size_t>(order[c])).begin());
  }
  return result;
}

KMeansResult kmeans_best_of(const Matrix& x, int k, std::uint64_t seed, int restarts) {
  if (restarts < 1) throw Error(Errc::invalid_argument, "k-means needs at least one restart");
  KMeansResult best = kmeans(x, k, seed);
  for (int r = 1; r < restarts; ++r) {
    auto run = kmeans(x, k, seed + static_cast<std::uint64_t>(r) * 0x9e3779b97f4a7c15ULL);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

KSelection select_k(const Matrix& x, int k_min, int k_max, std::uint64_t seed, int restarts) {
  if (k_min < 2 || k_max < k_min || static_cast<std::size_t>(k_max) > x.rows())
    throw Error(Errc::invalid_argument, "k range must lie within [2, n]");
  KSelection sel;
  double best = -std::numeric_limits<double>::infinity();
  for (int k = k_min; k <= k_max; ++k) {
    const auto km = kmeans_best_of(x, k, seed + static_cast<std::uint64_t>(k), restarts);
    const double s = km.assignment.cluster_count >= 2 ? silhouette(x, km.assignment.labels) : -1.0;
    sel.scores.emplace_back(k, s);
    if (s > best) {
      best = s;
      sel.best_k = k;
    }
  }
  return sel;
}

}  // namespace topictrend::cluster
