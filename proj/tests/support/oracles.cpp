#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace oracle {

double euclid(const Matrix& x, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    const double d = x(i, c) - x(j, c);
    s += d * d;
  }
  return std::sqrt(s);
}

double cosine_distance(const Matrix& x, std::size_t i, std::size_t j) {
  double dot = 0.0, ni = 0.0, nj = 0.0;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    dot += x(i, c) * x(j, c);
    ni += x(i, c) * x(i, c);
    nj += x(j, c) * x(j, c);
  }
  if (ni == 0.0 || nj == 0.0) return 1.0;
  return std::max(0.0, 1.0 - dot / (std::sqrt(ni) * std::sqrt(nj)));
}

std::vector<double> core_distances(const Matrix& x, int min_samples, bool cosine) {
  std::vector<double> out;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::vector<double> d;
    for (std::size_t j = 0; j < x.rows(); ++j) {
      if (j != i) d.push_back(cosine ? cosine_distance(x, i, j) : euclid(x, i, j));
    }
    std::sort(d.begin(), d.end());
    out.push_back(d[static_cast<std::size_t>(min_samples) - 1]);
  }
  return out;
}

double mst_weight(const std::vector<Edge>& edges) {
  double s = 0.0;
  for (const auto& e : edges) s += e.w;
  return s;
}

double dbcv(const Matrix& x, std::span<const int> labels, bool cosine) {
  auto dist = [&](std::size_t i, std::size_t j) { return cosine ? cosine_distance(x, i, j) : euclid(x, i, j); };
  std::map<int, std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0) clusters[labels[i]].push_back(i);
  }
  if (clusters.size() < 2) throw std::invalid_argument("need two clusters");
  const double dim = static_cast<double>(x.cols());

  struct Info {
    std::vector<std::size_t> members;
    std::vector<double> apcd;
    std::vector<std::size_t> internal;  // row indices
    double sparseness = 0.0;
  };
  std::vector<Info> infos;
  for (const auto& [label, members] : clusters) {
    Info info;
    info.members = members;
    const std::size_t m = members.size();
    if (m < 2) throw std::invalid_argument("cluster of size 1");
    for (std::size_t a = 0; a < m; ++a) {
      double sum = 0.0;
      bool zero = false;
      for (std::size_t b = 0; b < m; ++b) {
        if (a == b) continue;
        const double d = dist(members[a], members[b]);
        if (d == 0.0) zero = true;
        else sum += std::pow(1.0 / d, dim);
      }
      info.apcd.push_back(zero ? 0.0 : std::pow(sum / static_cast<double>(m - 1), -1.0 / dim));
    }
    auto mr = [&](std::size_t a, std::size_t b) {
      return std::max({info.apcd[a], info.apcd[b], dist(members[a], members[b])});
    };
    // Kruskal with (weight, a, b) order; members are ascending so local and
    // global index order agree.
    std::vector<Edge> all;
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a + 1; b < m; ++b) all.push_back({a, b, mr(a, b)});
    std::sort(all.begin(), all.end(), [](const Edge& p, const Edge& q) {
      return std::tie(p.w, p.a, p.b) < std::tie(q.w, q.a, q.b);
    });
    std::vector<std::size_t> parent(m);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t v) {
      while (parent[v] != v) v = parent[v];
      return v;
    };
    std::vector<Edge> tree;
    for (const auto& e : all) {
      if (find(e.a) == find(e.b)) continue;
      parent[find(e.a)] = find(e.b);
      tree.push_back(e);
    }
    std::vector<int> degree(m, 0);
    for (const auto& e : tree) {
      ++degree[e.a];
      ++degree[e.b];
    }
    std::vector<bool> internal(m);
    bool any = false;
    for (std::size_t a = 0; a < m; ++a) any |= (internal[a] = degree[a] > 1);
    if (!any) internal.assign(m, true);
    for (std::size_t a = 0; a < m; ++a) {
      if (internal[a]) info.internal.push_back(a);
    }
    bool found = false;
    for (const auto& e : tree) {
      if (internal[e.a] && internal[e.b]) {
        info.sparseness = found ? std::max(info.sparseness, e.w) : e.w;
        found = true;
      }
    }
    if (!found) {
      for (const auto& e : tree) info.sparseness = std::max(info.sparseness, e.w);
    }
    infos.push_back(std::move(info));
  }

  double total = 0.0;
  for (std::size_t i = 0; i < infos.size(); ++i) {
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < infos.size(); ++j) {
      if (i == j) continue;
      for (auto a : infos[i].internal)
        for (auto b : infos[j].internal) {
          const double w = std::max({infos[i].apcd[a], infos[j].apcd[b],
                                     dist(infos[i].members[a], infos[j].members[b])});
          sep = std::min(sep, w);
        }
    }
    const double sp = infos[i].sparseness;
    const double v = std::max(sep, sp) > 0.0 ? (sep - sp) / std::max(sep, sp) : 0.0;
    total += static_cast<double>(infos[i].members.size()) / static_cast<double>(labels.size()) * v;
  }
  return total;
}

double silhouette(const Matrix& x, std::span<const int> labels) {
  std::map<int, std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0) clusters[labels[i]].push_back(i);
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) continue;
    ++count;
    const auto& own = clusters[labels[i]];
    if (own.size() == 1) continue;
    double a = 0.0;
    for (auto j : own) a += euclid(x, i, j);
    a /= static_cast<double>(own.size() - 1);
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [label, members] : clusters) {
      if (label == labels[i]) continue;
      double s = 0.0;
      for (auto j : members) s += euclid(x, i, j);
      b = std::min(b, s / static_cast<double>(members.size()));
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) sum += (b - a) / denom;
  }
  return sum / static_cast<double>(count);
}

double adjusted_rand(std::span<const int> a, std::span<const int> b) {
  std::map<std::pair<int, int>, double> table;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1;
    rows[a[i]] += 1;
    cols[b[i]] += 1;
  }
  auto c2 = [](double v) { return v * (v - 1) / 2; };
  double index = 0, sa = 0, sb = 0;
  for (const auto& [k, v] : table) index += c2(v);
  for (const auto& [k, v] : rows) sa += c2(v);
  for (const auto& [k, v] : cols) sb += c2(v);
  const double expected = sa * sb / c2(static_cast<double>(a.size()));
  const double max_index = (sa + sb) / 2;
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

void jacobi_eigen(const Matrix& input, std::vector<double>& values, Matrix& vectors) {
  const std::size_t n = input.rows();
  Matrix a = input;
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-26) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  values.clear();
  vectors = Matrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    values.push_back(a(order[c], order[c]));
    for (std::size_t r = 0; r < n; ++r) vectors(r, c) = v(r, order[c]);
  }
}

Matrix covariance(const Matrix& x) {
  const std::size_t n = x.rows(), d = x.cols();
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mean[j] += x(i, j) / static_cast<double>(n);
  Matrix c(d, d);
  for (std::size_t p = 0; p < d; ++p)
    for (std::size_t q = 0; q < d; ++q) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += (x(i, p) - mean[p]) * (x(i, q) - mean[q]);
      c(p, q) = s / static_cast<double>(n - 1);
    }
  return c;
}

std::vector<std::map<std::string, double>> ctfidf(const std::vector<std::map<std::string, std::int64_t>>& classes,
                                                  bool reduce_frequent_words) {
  std::map<std::string, double> f;
  std::vector<double> totals;
  for (const auto& c : classes) {
    double t = 0;
    for (const auto& [term, n] : c) {
      f[term] += static_cast<double>(n);
      t += static_cast<double>(n);
    }
    totals.push_back(t);
  }
  double a = 0;
  for (double t : totals) a += t;
  a /= static_cast<double>(classes.size());
  std::vector<std::map<std::string, double>> out;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    std::map<std::string, double> w;
    for (const auto& [term, n] : classes[c]) {
      if (n == 0) continue;
      double tf = static_cast<double>(n) / totals[c];
      if (reduce_frequent_words) tf = std::sqrt(tf);
      w[term] = tf * std::log(1 + a / f[term]);
    }
    out.push_back(w);
  }
  return out;
}

double chi2_sf_df1(double x) { return std::erfc(std::sqrt(x / 2)); }
double chi2_sf_df2(double x) { return std::exp(-x / 2); }

double kruskal_h(const std::vector<std::vector<double>>& groups) {
  std::vector<double> all;
  for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
  const double n = static_cast<double>(all.size());
  auto rank = [&](double v) {
    double less = 0, equal = 0;
    for (double u : all) {
      if (u < v) less += 1;
      else if (u == v) equal += 1;
    }
    return less + (equal + 1) / 2;
  };
  const double mean_rank = (n + 1) / 2;
  double between = 0;
  for (const auto& g : groups) {
    double r = 0;
    for (double v : g) r += rank(v);
    r /= static_cast<double>(g.size());
    between += static_cast<double>(g.size()) * (r - mean_rank) * (r - mean_rank);
  }
  std::map<double, double> ties;
  for (double v : all) ties[v] += 1;
  double t = 0;
  for (const auto& [v, c] : ties) t += c * c * c - c;
  const double correction = 1 - t / (n * n * n - n);
  return 12 / (n * (n + 1)) * between / correction;
}

}  // namespace oracle
