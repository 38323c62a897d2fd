#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "topictrend/kernels.hpp"

namespace topictrend::kernels {

double squared_euclidean(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_euclidean(a, b));
}

RowDistance::RowDistance(const Matrix& x, Metric metric) : x_(x), metric_(metric) {
  if (metric_ == Metric::cosine) {
    norms_.resize(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
      double s = 0.0;
      for (double v : x.row(i)) s += v * v;
      norms_[i] = std::sqrt(s);
    }
  }
}

double RowDistance::operator()(std::size_t i, std::size_t j) const {
  auto a = x_.row(i);
  auto b = x_.row(j);
  if (metric_ == Metric::euclidean) return euclidean(a, b);
  const double denom = norms_[i] * norms_[j];
  if (denom == 0.0) return 1.0;
  double dot = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) dot += a[k] * b[k];
  return std::max(0.0, 1.0 - dot / denom);
}

namespace serial {

std::vector<double> core_distances(const Matrix& x, int min_samples, Metric metric) {
  const std::size_t n = x.rows();
  const auto k = static_cast<std::size_t>(min_samples);
  RowDistance dist(x, metric);
  std::vector<double> core(n);
  std::vector<double> row;
  for (std::size_t i = 0; i < n; ++i) {
    row.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) row.push_back(dist(i, j));
    }
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k - 1), row.end());
    core[i] = row[k - 1];
  }
  return core;
}

std::vector<MstEdge> mutual_reachability_mst(const Matrix& x, std::span<const double> core,
                                             Metric metric) {
  const std::size_t n = x.rows();
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  RowDistance dist(x, metric);
  std::vector<bool> in_tree(n, false);
  std::vector<double> best_w(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> best_p(n, none);
  std::vector<MstEdge> edges;
  if (n < 2) return edges;
  edges.reserve(n - 1);

  std::size_t current = 0;
  in_tree[0] = true;
  for (std::size_t step = 1; step < n; ++step) {
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const double w = std::max({core[current], core[v], dist(current, v)});
      const std::size_t lo = std::min(current, v), hi = std::max(current, v);
      if (best_p[v] == none ||
          edge_less(w, lo, hi, best_w[v], std::min(best_p[v], v), std::max(best_p[v], v))) {
        best_w[v] = w;
        best_p[v] = current;
      }
    }
    std::size_t pick = none;
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      if (pick == none ||
          edge_less(best_w[v], std::min(best_p[v], v), std::max(best_p[v], v), best_w[pick],
                    std::min(best_p[pick], pick), std::max(best_p[pick], pick))) {
        pick = v;
      }
    }
    edges.push_back({std::min(pick, best_p[pick]), std::max(pick, best_p[pick]), best_w[pick]});
    in_tree[pick] = true;
    current = pick;
  }
  return edges;
}

std::vector<double> silhouette_values(const Matrix& x, std::span<const int> labels,
                                      int cluster_count, Metric metric) {
  const std::size_t n = x.rows();
  RowDistance dist(x, metric);
  std::vector<std::size_t> sizes(static_cast<std::size_t>(cluster_count), 0);
  for (int l : labels) {
    if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
  }
  std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> sums(static_cast<std::size_t>(cluster_count));
  for (std::size_t i = 0; i < n; ++i) {
    const int li = labels[i];
    if (li < 0) continue;
    if (sizes[static_cast<std::size_t>(li)] == 1) {
      out[i] = 0.0;
      continue;
    }
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || labels[j] < 0) continue;
      sums[static_cast<std::size_t>(labels[j])] += dist(i, j);
    }
    const double a = sums[static_cast<std::size_t>(li)] /
                     static_cast<double>(sizes[static_cast<std::size_t>(li)] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < cluster_count; ++c) {
      if (c == li || sizes[static_cast<std::size_t>(c)] == 0) continue;
      b = std::min(b, sums[static_cast<std::size_t>(c)] /
                          static_cast<double>(sizes[static_cast<std::size_t>(c)]));
    }
    const double m = std::max(a, b);
    out[i] = m == 0.0 ? 0.0 : (b - a) / m;
  }
  return out;
}

Matrix covariance(const Matrix& centred) {
  const std::size_t n = centred.rows(), d = centred.cols();
  Matrix cov(d, d);
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += centred(i, a) * centred(i, b);
      cov(a, b) = cov(b, a) = s / denom;
    }
  }
  return cov;
}

Matrix project(const Matrix& x, std::span<const double> mean, const Matrix& basis) {
  const std::size_t n = x.rows(), d = x.cols(), k = basis.cols();
  Matrix out(n, k);
  std::vector<double> centred(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < d; ++c) centred[c] = x(i, c) - mean[c];
    for (std::size_t j = 0; j < k; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += centred[c] * basis(c, j);
      out(i, j) = s;
    }
  }
  return out;
}

std::vector<int> assign_nearest(const Matrix& x, const Matrix& centroids,
                                std::vector<double>& dist2) {
  const std::size_t n = x.rows();
  std::vector<int> labels(n);
  dist2.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
      const double d = squared_euclidean(x.row(i), centroids.row(c));
      if (d < best) {
        best = d;
        arg = static_cast<int>(c);
      }
    }
    labels[i] = arg;
    dist2[i] = best;
  }
  return labels;
}

}  // namespace serial
}  // namespace topictrend::kernels
