#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "topictrend/date.hpp"

namespace topictrend::dynamics {
struct TopicTimeSeries;
}

namespace topictrend::stats {

struct RankedSample {
  std::vector<double> values;
  std::vector<double> ranks;             // 1-based; tied runs share the mean rank
  std::vector<std::size_t> tie_groups;   // sizes (>= 2) of tied runs, ascending value order
  std::size_t n = 0;
};

// Throws Error(invalid_argument) on empty or non-finite input.
RankedSample rank_with_ties(std::span<const double> values);

struct KruskalWallisResult {
  double h = 0.0;
  int df = 0;
  double p = 1.0;
  std::vector<std::size_t> group_sizes;
  std::vector<double> rank_sums;
  double tie_correction = 1.0;  // 1 - sum(t^3 - t) / (N^3 - N)
  double alpha = 0.05;
  bool significant = false;     // p < alpha
  bool windows_overlap = false; // set by test_topic_windows
};

// Tie-corrected Kruskal-Wallis H over k >= 2 groups with a chi-square(k - 1)
// p-value. Throws Error(empty_group) for an empty group and
// Error(degenerate_ties) when every observation is equal.
KruskalWallisResult kruskal_wallis(const std::vector<std::vector<double>>& groups, double alpha = 0.05);

// Regularised upper incomplete gamma Q(a, x): series for x < a + 1,
// continued fraction otherwise.
double gamma_q(double a, double x);

// Upper tail of the chi-square distribution. Throws Error(invalid_argument)
// for negative or non-finite x or df <= 0.
double chi2_sf(double x, double df);

// Compares a topic's bin intensities inside two date windows (a bin belongs
// to a window when its start date does). Throws Error(topic_not_found) or
// Error(window_too_narrow) when a window holds fewer than two bins.
KruskalWallisResult test_topic_windows(const dynamics::TopicTimeSeries& ts, int topic_id,
                                       const DateRange& window1, const DateRange& window2,
                                       double alpha = 0.05);

}  // namespace topictrend::stats
