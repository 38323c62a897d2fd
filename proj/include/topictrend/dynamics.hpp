#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "topictrend/date.hpp"

namespace topictrend::dynamics {

inline constexpr int kMinBinWeeks = 1;
inline constexpr int kMaxBinWeeks = 4;

// Per-topic, per-bin document counts over half-open bins
// [origin + 7w*b, origin + 7w*(b+1)).
struct TopicTimeSeries {
  int bin_width_weeks = 1;
  Date origin;
  std::size_t topic_count = 0;
  std::size_t bin_count = 0;
  std::vector<std::int64_t> counts;    // topic-major: counts[t * bin_count + b]
  std::vector<std::int64_t> outliers;  // per bin
  std::vector<std::int64_t> totals;    // per bin, outliers included
  std::vector<double> intensity;       // counts / totals, 0 for empty bins

  std::int64_t count(std::size_t topic, std::size_t bin) const { return counts[topic * bin_count + bin]; }
  double intensity_at(std::size_t topic, std::size_t bin) const { return intensity[topic * bin_count + bin]; }
  Date bin_start(std::size_t bin) const;
  int bin_days() const { return 7 * bin_width_weeks; }
};

// Throws Error(invalid_argument) unless 1 <= weeks <= 4.
void check_bin_width(int weeks);

// floor(days since origin / (7 * weeks)). Throws Error(date_before_origin).
std::vector<std::size_t> assign_bins(std::span<const Date> dates, int weeks, const Date& origin);

// Bins needed to reach `last` (inclusive) from origin.
std::size_t bins_through(const Date& origin, const Date& last, int weeks);

// Tallies labels (-1 = outlier) into bins. bin_count may exceed the largest
// bin index to pad trailing empty bins. Labels >= topic_count and bin indices
// >= bin_count are rejected with Error(invalid_argument).
TopicTimeSeries build_series(std::span<const int> labels, std::span<const std::size_t> bins,
                             std::size_t topic_count, int weeks, const Date& origin,
                             std::size_t bin_count);

// Recomputes totals and intensities from counts and outliers.
void refresh_intensity(TopicTimeSeries& ts);

struct SeriesPoint {
  Date bin_start;
  std::int64_t count = 0;
  double intensity = 0.0;
};

struct TopicSeries {
  int topic_id = 0;
  std::vector<SeriesPoint> points;
};

// Bins whose start falls in range, per topic. Throws Error(topic_not_found).
std::vector<TopicSeries> series_for_topics(const TopicTimeSeries& ts, std::span<const int> topic_ids,
                                           const DateRange& range);

// Intensities of the bins whose start falls in range.
std::vector<double> intensities_in(const TopicTimeSeries& ts, int topic_id, const DateRange& range);

// Median intensity over the bins starting inside the interval. Throws
// Error(no_bins_in_interval).
double interval_median(const TopicTimeSeries& ts, int topic_id, const DateRange& interval);

// Consecutive intervals of `months` calendar months starting at window.start;
// the last one is clipped to window.end.
std::vector<DateRange> month_intervals(const DateRange& window, int months = 2);

// CSV with one row per topic and one column per interval holding
// median intensity x 1000; intervals without bins are left empty.
std::string heatmap_csv(const TopicTimeSeries& ts, const std::vector<DateRange>& intervals);

struct CasePoint {
  Date date;
  double value = 0.0;
  friend bool operator==(const CasePoint&, const CasePoint&) = default;
};

struct Event {
  Date date;
  std::string label;
  friend bool operator==(const Event&, const Event&) = default;
};

struct OverlaySeries {
  std::vector<CasePoint> cases;  // ascending date
  std::vector<Event> events;     // ascending date, file order on ties
  friend bool operator==(const OverlaySeries&, const OverlaySeries&) = default;
};

// `date,value` and `date,label` CSV files, header optional. An empty path
// means no file. Throws Error(parse_error) naming file and line, or
// Error(io_error).
std::vector<CasePoint> load_cases(const std::filesystem::path& path);
std::vector<Event> load_events(const std::filesystem::path& path);
OverlaySeries load_overlays(const std::filesystem::path& cases, const std::filesystem::path& events);

OverlaySeries slice_overlays(const OverlaySeries& overlays, const DateRange& range);

}  // namespace topictrend::dynamics
