#include "topictrend/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "topictrend/csv.hpp"
#include "topictrend/error.hpp"

namespace topictrend::dynamics {

Date TopicTimeSeries::bin_start(std::size_t bin) const {
  return Date::from_days(origin.days_since_epoch() + static_cast<int>(bin) * bin_days());
}

void check_bin_width(int weeks) {
  if (weeks < kMinBinWeeks || weeks > kMaxBinWeeks)
    throw Error(Errc::invalid_argument,
                "bin width must be 1-4 weeks, got " + std::to_string(weeks));
}

std::vector<std::size_t> assign_bins(std::span<const Date> dates, int weeks, const Date& origin) {
  check_bin_width(weeks);
  std::vector<std::size_t> bins;
  bins.reserve(dates.size());
  const int width = 7 * weeks;
  for (const auto& d : dates) {
    const int days = d.days_since_epoch() - origin.days_since_epoch();
    if (days < 0)
      throw Error(Errc::date_before_origin,
                  "date " + d.iso_day() + " precedes the bin origin " + origin.iso_day());
    bins.push_back(static_cast<std::size_t>(days / width));
  }
  return bins;
}

std::size_t bins_through(const Date& origin, const Date& last, int weeks) {
  check_bin_width(weeks);
  const int days = last.days_since_epoch() - origin.days_since_epoch();
  if (days < 0) return 0;
  return static_cast<std::size_t>(days / (7 * weeks)) + 1;
}

void refresh_intensity(TopicTimeSeries& ts) {
  ts.totals.assign(ts.bin_count, 0);
  for (std::size_t b = 0; b < ts.bin_count; ++b) {
    std::int64_t total = ts.outliers[b];
    for (std::size_t t = 0; t < ts.topic_count; ++t) total += ts.count(t, b);
    ts.totals[b] = total;
  }
  ts.intensity.assign(ts.counts.size(), 0.0);
  for (std::size_t t = 0; t < ts.topic_count; ++t) {
    for (std::size_t b = 0; b < ts.bin_count; ++b) {
      if (ts.totals[b] > 0)
        ts.intensity[t * ts.bin_count + b] =
            static_cast<double>(ts.count(t, b)) / static_cast<double>(ts.totals[b]);
    }
  }
}

TopicTimeSeries build_series(std::span<const int> labels, std::span<const std::size_t> bins,
                             std::size_t topic_count, int weeks, const Date& origin,
                             std::size_t bin_count) {
  check_bin_width(weeks);
  if (labels.size() != bins.size())
    throw Error(Errc::dimension_mismatch, "labels and bin indices differ in length");
  TopicTimeSeries ts;
  ts.bin_width_weeks = weeks;
  ts.origin = origin;
  ts.topic_count = topic_count;
  ts.bin_count = bin_count;
  ts.counts.assign(topic_count * bin_count, 0);
  ts.outliers.assign(bin_count, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::size_t b = bins[i];
    if (b >= bin_count)
      throw Error(Errc::invalid_argument, "document " + std::to_string(i) + " falls past the last bin");
    if (labels[i] < 0) {
      ++ts.outliers[b];
    } else {
      const auto t = static_cast<std::size_t>(labels[i]);
      if (t >= topic_count) throw Error(Errc::invalid_argument, "label out of range: " + std::to_string(t));
      ++ts.counts[t * bin_count + b];
    }
  }
  refresh_intensity(ts);
  return ts;
}

namespace {

void check_topic(const TopicTimeSeries& ts, int topic_id) {
  if (topic_id < 0 || static_cast<std::size_t>(topic_id) >= ts.topic_count)
    throw Error(Errc::topic_not_found, "topic " + std::to_string(topic_id) + " does not exist");
}

// First bin starting at or after `from`, and one past the last bin starting
// at or before `to`.
std::pair<std::size_t, std::size_t> bin_span(const TopicTimeSeries& ts, const DateRange& range) {
  const int width = ts.bin_days();
  const int lo = range.start.days_since_epoch() - ts.origin.days_since_epoch();
  const int hi = range.end.days_since_epoch() - ts.origin.days_since_epoch();
  if (hi < 0 || hi < lo) return {0, 0};
  const auto first = lo <= 0 ? std::size_t{0} : static_cast<std::size_t>((lo + width - 1) / width);
  const auto last = std::min(ts.bin_count, static_cast<std::size_t>(hi / width) + 1);
  return {std::min(first, last), last};
}

}  // namespace

std::vector<TopicSeries> series_for_topics(const TopicTimeSeries& ts, std::span<const int> topic_ids,
                                           const DateRange& range) {
  for (int id : topic_ids) check_topic(ts, id);
  const auto [first, last] = bin_span(ts, range);
  std::vector<TopicSeries> out;
  for (int id : topic_ids) {
    TopicSeries s{id, {}};
    const auto t = static_cast<std::size_t>(id);
    for (std::size_t b = first; b < last; ++b) s.points.push_back({ts.bin_start(b), ts.count(t, b), ts.intensity_at(t, b)});
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<double> intensities_in(const TopicTimeSeries& ts, int topic_id, const DateRange& range) {
  check_topic(ts, topic_id);
  const auto [first, last] = bin_span(ts, range);
  std::vector<double> out;
  for (std::size_t b = first; b < last; ++b) out.push_back(ts.intensity_at(static_cast<std::size_t>(topic_id), b));
  return out;
}

double interval_median(const TopicTimeSeries& ts, int topic_id, const DateRange& interval) {
  auto values = intensities_in(ts, topic_id, interval);
  if (values.empty())
    throw Error(Errc::no_bins_in_interval,
                "no bins start in " + interval.start.iso_day() + ".." + interval.end.iso_day());
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 ? values[m] : (values[m - 1] + values[m]) / 2.0;
}

std::vector<DateRange> month_intervals(const DateRange& window, int months) {
  using namespace std::chrono;
  if (months < 1) throw Error(Errc::invalid_argument, "interval length must be at least one month");
  std::vector<DateRange> out;
  const year_month_day anchor = window.start.ymd();
  for (int i = 0;; ++i) {
    auto advance = [&](int steps) {
      year_month_day ymd = anchor + std::chrono::months(steps * months);
      if (!ymd.ok()) ymd = ymd.year() / ymd.month() / last;
      return Date{sys_days{ymd}, DatePrecision::day};
    };
    const Date start = advance(i);
    if (start.day > window.end.day) break;
    Date end = Date::from_days(advance(i + 1).days_since_epoch() - 1);
    if (end.day > window.end.day) end = window.end;
    out.push_back({start, end});
  }
  return out;
}

std::string heatmap_csv(const TopicTimeSeries& ts, const std::vector<DateRange>& intervals) {
  std::ostringstream out;
  out << "topic";
  for (const auto& iv : intervals) out << ',' << iv.start.iso_day() << ".." << iv.end.iso_day();
  out << '\n';
  char buf[64];
  for (std::size_t t = 0; t < ts.topic_count; ++t) {
    out << t;
    for (const auto& iv : intervals) {
      out << ',';
      const auto values = intensities_in(ts, static_cast<int>(t), iv);
      if (values.empty()) continue;
      std::snprintf(buf, sizeof buf, "%.4f", 1000.0 * interval_median(ts, static_cast<int>(t), iv));
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

namespace {

std::vector<CsvRow> read_overlay_rows(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  auto rows = read_csv(in);
  // Optional header: a first row whose first cell reads "date".
  if (!rows.empty() && !rows.front().cells.empty()) {
    std::string first = rows.front().cells[0];
    std::transform(first.begin(), first.end(), first.begin(), [](unsigned char c) { return std::tolower(c); });
    if (first == "date") rows.erase(rows.begin());
  }
  return rows;
}

[[noreturn]] void row_error(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  throw Error(Errc::parse_error, path.string() + ":" + std::to_string(line) + ": " + what);
}

Date row_date(const std::filesystem::path& path, const CsvRow& row) {
  if (row.cells.size() != 2) row_error(path, row.line, "expected 2 columns, found " + std::to_string(row.cells.size()));
  const auto d = parse_day(row.cells[0]);
  if (!d) row_error(path, row.line, "bad date '" + row.cells[0] + "'");
  return *d;
}

}  // namespace

std::vector<CasePoint> load_cases(const std::filesystem::path& path) {
  std::vector<CasePoint> out;
  if (path.empty()) return out;
  for (const auto& row : read_overlay_rows(path)) {
    const Date d = row_date(path, row);
    const std::string& cell = row.cells[1];
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(v) || v < 0.0)
      row_error(path, row.line, "bad value '" + cell + "' (finite, non-negative number expected)");
    out.push_back({d, v});
  }
  std::stable_sort(out.begin(), out.end(), [](const CasePoint& a, const CasePoint& b) { return a.date.day < b.date.day; });
  return out;
}

std::vector<Event> load_events(const std::filesystem::path& path) {
  std::vector<Event> out;
  if (path.empty()) return out;
  for (const auto& row : read_overlay_rows(path)) {
    const Date d = row_date(path, row);
    if (row.cells[1].empty()) row_error(path, row.line, "empty event label");
    out.push_back({d, row.cells[1]});
  }
  std::stable_sort(out.begin(), out.end(), [](const Event& a, const Event& b) { return a.date.day < b.date.day; });
  return out;
}

OverlaySeries load_overlays(const std::filesystem::path& cases, const std::filesystem::path& events) {
  return {load_cases(cases), load_events(events)};
}

OverlaySeries slice_overlays(const OverlaySeries& overlays, const DateRange& range) {
  OverlaySeries out;
  for (const auto& c : overlays.cases) {
    if (range.contains(c.date)) out.cases.push_back(c);
  }
  for (const auto& e : overlays.events) {
    if (range.contains(e.date)) out.events.push_back(e);
  }
  return out;
}

}  // namespace topictrend::dynamics
