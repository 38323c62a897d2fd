#include "topictrend/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "topictrend/dynamics.hpp"
#include "topictrend/error.hpp"

namespace topictrend::stats {

RankedSample rank_with_ties(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::invalid_argument, "cannot rank an empty sample");
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(Errc::invalid_argument, "cannot rank non-finite values");
  }
  RankedSample out;
  out.values.assign(values.begin(), values.end());
  out.n = values.size();
  out.ranks.resize(out.n);

  std::vector<std::size_t> order(out.n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::size_t i = 0;
  while (i < out.n) {
    std::size_t j = i + 1;
    while (j < out.n && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 hold ranks i+1..j; their mean is (i + 1 + j) / 2.
    const double rank = static_cast<double>(i + 1 + j) / 2.0;
    for (std::size_t t = i; t < j; ++t) out.ranks[order[t]] = rank;
    if (j - i > 1) out.tie_groups.push_back(j - i);
    i = j;
  }
  return out;
}

KruskalWallisResult kruskal_wallis(const std::vector<std::vector<double>>& groups, double alpha) {
  if (groups.size() < 2) throw Error(Errc::invalid_argument, "Kruskal-Wallis needs at least two groups");
  std::vector<double> pooled;
  KruskalWallisResult res;
  res.alpha = alpha;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty())
      throw Error(Errc::empty_group, "group " + std::to_string(g + 1) + " has no observations");
    pooled.insert(pooled.end(), groups[g].begin(), groups[g].end());
    res.group_sizes.push_back(groups[g].size());
  }
  const auto ranked = rank_with_ties(pooled);
  const auto n = static_cast<double>(ranked.n);

  double ties = 0.0;
  for (std::size_t t : ranked.tie_groups) {
    const auto tt = static_cast<double>(t);
    ties += (tt - 1.0) * tt * (tt + 1.0);
  }
  res.tie_correction = 1.0 - ties / (n * n * n - n);
  if (res.tie_correction <= 0.0)
    throw Error(Errc::degenerate_ties, "degenerate: all values tied");

  double sum = 0.0;
  std::size_t offset = 0;
  for (std::size_t size : res.group_sizes) {
    double r = 0.0;
    for (std::size_t i = 0; i < size; ++i) r += ranked.ranks[offset + i];
    offset += size;
    res.rank_sums.push_back(r);
    sum += r * r / static_cast<double>(size);
  }
  const double h = (12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0)) / res.tie_correction;
  res.h = std::max(0.0, h);
  res.df = static_cast<int>(groups.size()) - 1;
  res.p = chi2_sf(res.h, res.df);
  res.significant = res.p < alpha;
  return res;
}

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 100000;

double gamma_p_series(double a, double x) {
  double ap = a, del = 1.0 / a, sum = del;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_fraction(double a, double x) {
  // Modified Lentz evaluation of the continued fraction for Q.
  double b = x + 1.0 - a, c = 1.0 / kTiny, d = 1.0 / b, h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  if (x < a + 1.0) return std::clamp(1.0 - gamma_p_series(a, x), 0.0, 1.0);
  return std::clamp(gamma_q_fraction(a, x), 0.0, 1.0);
}

double chi2_sf(double x, double df) {
  if (!std::isfinite(x) || x < 0.0) throw Error(Errc::invalid_argument, "chi-square statistic must be finite and >= 0");
  if (!(df > 0.0)) throw Error(Errc::invalid_argument, "chi-square degrees of freedom must be positive");
  return gamma_q(df / 2.0, x / 2.0);
}

KruskalWallisResult test_topic_windows(const dynamics::TopicTimeSeries& ts, int topic_id,
                                       const DateRange& window1, const DateRange& window2,
                                       double alpha) {
  const auto g1 = dynamics::intensities_in(ts, topic_id, window1);
  const auto g2 = dynamics::intensities_in(ts, topic_id, window2);
  for (const auto* g : {&g1, &g2}) {
    if (g->size() < 2)
      throw Error(Errc::window_too_narrow,
                  "window too narrow for the chosen bin width: " + std::to_string(g->size()) +
                      " bin(s) of " + std::to_string(ts.bin_width_weeks) + " week(s)");
  }
  auto res = kruskal_wallis({g1, g2}, alpha);
  res.windows_overlap = window1.overlaps(window2);
  return res;
}

}  // namespace topictrend::stats
