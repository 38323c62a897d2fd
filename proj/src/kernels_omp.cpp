#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "topictrend/kernels.hpp"

namespace topictrend::kernels {

void set_thread_count(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace parallel {

std::vector<double> core_distances(const Matrix& x, int min_samples, Metric metric) {
  const auto n = static_cast<std::ptrdiff_t>(x.rows());
  const auto k = static_cast<std::ptrdiff_t>(min_samples);
  RowDistance dist(x, metric);
  std::vector<double> core(x.rows());
#pragma omp parallel
  {
    std::vector<double> row(x.rows());
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      std::size_t m = 0;
      for (std::ptrdiff_t j = 0; j < n; ++j) {
        if (j != i) row[m++] = dist(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      }
      std::nth_element(row.begin(), row.begin() + (k - 1),
                       row.begin() + static_cast<std::ptrdiff_t>(m));
      core[static_cast<std::size_t>(i)] = row[static_cast<std::size_t>(k - 1)];
    }
  }
  return core;
}

namespace {

struct Candidate {
  double w = std::numeric_limits<double>::infinity();
  std::size_t lo = std::numeric_limits<std::size_t>::max();
  std::size_t hi = std::numeric_limits<std::size_t>::max();
  std::size_t slot = 0;

  bool better_than(const Candidate& o) const { return edge_less(w, lo, hi, o.w, o.lo, o.hi); }
};

}  // namespace

std::vector<MstEdge> mutual_reachability_mst(const Matrix& x, std::span<const double> core,
                                             Metric metric) {
  const std::size_t n = x.rows();
  RowDistance dist(x, metric);
  std::vector<MstEdge> edges;
  if (n < 2) return edges;
  edges.reserve(n - 1);

  // Vertices not yet in the tree, with their best known connection.
  std::vector<std::size_t> remaining(n - 1);
  for (std::size_t v = 1; v < n; ++v) remaining[v - 1] = v;
  std::vector<Candidate> best(n - 1);

  std::size_t current = 0;
  while (!remaining.empty()) {
    const auto m = static_cast<std::ptrdiff_t>(remaining.size());
    Candidate winner;
#pragma omp parallel
    {
      Candidate local;
#pragma omp for schedule(static)
      for (std::ptrdiff_t s = 0; s < m; ++s) {
        const std::size_t v = remaining[static_cast<std::size_t>(s)];
        Candidate& b = best[static_cast<std::size_t>(s)];
        Candidate c{std::max({core[current], core[v], dist(current, v)}), std::min(current, v),
                    std::max(current, v), static_cast<std::size_t>(s)};
        if (c.better_than(b)) b = c;
        b.slot = static_cast<std::size_t>(s);
        if (b.better_than(local)) local = b;
      }
#pragma omp critical
      {
        if (local.better_than(winner)) winner = local;
      }
    }
    edges.push_back({winner.lo, winner.hi, winner.w});
    current = remaining[winner.slot];
    remaining[winner.slot] = remaining.back();
    best[winner.slot] = best[remaining.size() - 1];
    remaining.pop_back();
  }
  return edges;
}

std::vector<double> silhouette_values(const Matrix& x, std::span<const int> labels,
                                      int cluster_count, Metric metric) {
  const auto n = static_cast<std::ptrdiff_t>(x.rows());
  const auto cc = static_cast<std::size_t>(cluster_count);
  RowDistance dist(x, metric);
  std::vector<std::size_t> sizes(cc, 0);
  for (int l : labels) {
    if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
  }
  std::vector<double> out(x.rows(), std::numeric_limits<double>::quiet_NaN());
#pragma omp parallel
  {
    std::vector<double> sums(cc);
#pragma omp for schedule(dynamic, 16)
    for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      const int li = labels[i];
      if (li < 0) continue;
      const auto lu = static_cast<std::size_t>(li);
      if (sizes[lu] == 1) {
        out[i] = 0.0;
        continue;
      }
      std::fill(sums.begin(), sums.end(), 0.0);
      for (std::size_t j = 0; j < x.rows(); ++j) {
        if (j == i || labels[j] < 0) continue;
        sums[static_cast<std::size_t>(labels[j])] += dist(i, j);
      }
      const double a = sums[lu] / static_cast<double>(sizes[lu] - 1);
      double b = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < cc; ++c) {
        if (c == lu || sizes[c] == 0) continue;
        b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
      }
      const double mx = std::max(a, b);
      out[i] = mx == 0.0 ? 0.0 : (b - a) / mx;
    }
  }
  return out;
}

Matrix covariance(const Matrix& centred) {
  const std::size_t n = centred.rows(), d = centred.cols();
  // Column-major copy so every dot product walks contiguous memory.
  std::vector<double> cols(n * d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < d; ++c) cols[c * n + i] = centred(i, c);

  Matrix cov(d, d);
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  const auto dd = static_cast<std::ptrdiff_t>(d);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t aa = 0; aa < dd; ++aa) {
    const auto a = static_cast<std::size_t>(aa);
    const double* ca = cols.data() + a * n;
    for (std::size_t b = a; b < d; ++b) {
      const double* cb = cols.data() + b * n;
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += ca[i] * cb[i];
      cov(a, b) = s / denom;
      cov(b, a) = s / denom;
    }
  }
  return cov;
}

Matrix project(const Matrix& x, std::span<const double> mean, const Matrix& basis) {
  const std::size_t d = x.cols(), k = basis.cols();
  const auto n = static_cast<std::ptrdiff_t>(x.rows());
  Matrix out(x.rows(), k);
#pragma omp parallel
  {
    std::vector<double> centred(d);
#pragma omp for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      for (std::size_t c = 0; c < d; ++c) centred[c] = x(i, c) - mean[c];
      for (std::size_t j = 0; j < k; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < d; ++c) s += centred[c] * basis(c, j);
        out(i, j) = s;
      }
    }
  }
  return out;
}

std::vector<int> assign_nearest(const Matrix& x, const Matrix& centroids,
                                std::vector<double>& dist2) {
  const auto n = static_cast<std::ptrdiff_t>(x.rows());
  std::vector<int> labels(x.rows());
  dist2.assign(x.rows(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
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

}  // namespace parallel
}  // namespace topictrend::kernels
