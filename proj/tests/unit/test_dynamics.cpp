#include <doctest.h>

#include <fstream>

#include "check.hpp"
#include "synthetic.hpp"
#include "topictrend/dynamics.hpp"
#include "topictrend/rng.hpp"

using namespace topictrend;
using namespace topictrend::dynamics;

namespace {

Date day(int y, unsigned m, unsigned d) { return Date::from_ymd(y, m, d); }

// Two topics over four weekly bins starting 2020-01-06 (a Monday).
TopicTimeSeries small_series() {
  const Date origin = day(2020, 1, 6);
  const std::vector<Date> dates{day(2020, 1, 6),  day(2020, 1, 12), day(2020, 1, 13), day(2020, 1, 13),
                                day(2020, 1, 19), day(2020, 1, 27), day(2020, 2, 1),  day(2020, 1, 8)};
  const std::vector<int> labels{0, 1, 0, -1, 1, 0, 0, -1};
  const auto bins = assign_bins(dates, 1, origin);
  return build_series(labels, bins, 2, 1, origin, 4);
}

}  // namespace

TEST_CASE("bin assignment is floor(days / 7w)") {
  const Date o = day(2020, 1, 1);
  const std::vector<Date> d{day(2020, 1, 1), day(2020, 1, 7), day(2020, 1, 8), day(2020, 1, 14), day(2020, 1, 15)};
  CHECK(assign_bins(d, 1, o) == std::vector<std::size_t>{0, 0, 1, 1, 2});
  CHECK(assign_bins(d, 2, o) == std::vector<std::size_t>{0, 0, 0, 0, 1});
  CHECK(assign_bins(d, 4, o) == std::vector<std::size_t>{0, 0, 0, 0, 0});
  CHECK(bins_through(o, day(2020, 1, 14), 1) == 2);
  CHECK(bins_through(o, day(2020, 1, 15), 1) == 3);
  CHECK(bins_through(o, day(2019, 12, 31), 1) == 0);
  const std::vector<Date> early{day(2019, 12, 31)};
  CHECK(error_code([&] { assign_bins(early, 1, o); }) == Errc::date_before_origin);
  CHECK(error_code([&] { check_bin_width(0); }) == Errc::invalid_argument);
  CHECK(error_code([&] { check_bin_width(5); }) == Errc::invalid_argument);
}

TEST_CASE("series counts, outlier-inclusive totals and intensities") {
  const auto ts = small_series();
  CHECK(ts.counts == std::vector<std::int64_t>{1, 1, 0, 2, 1, 1, 0, 0});
  CHECK(ts.outliers == std::vector<std::int64_t>{1, 1, 0, 0});
  CHECK(ts.totals == std::vector<std::int64_t>{3, 3, 0, 2});
  CHECK(ts.intensity_at(0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(ts.intensity_at(1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(ts.intensity_at(0, 2) == 0.0);
  CHECK(ts.intensity_at(0, 3) == 1.0);
  CHECK(ts.bin_start(2).iso() == "2020-01-20");

  const std::vector<int> labels{0, 2};
  const std::vector<std::size_t> bins{0, 0};
  CHECK(error_code([&] { build_series(labels, bins, 2, 1, day(2020, 1, 1), 1); }) == Errc::invalid_argument);
  const std::vector<std::size_t> past{0, 3};
  CHECK(error_code([&] { build_series(std::vector<int>{0, 0}, past, 1, 1, day(2020, 1, 1), 2); }) ==
        Errc::invalid_argument);
}

TEST_CASE("conservation: counts plus outliers equal documents per bin") {
  Xoshiro256 rng(5);
  std::vector<int> labels(2000);
  std::vector<Date> dates(2000);
  const Date origin = day(2020, 1, 1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = static_cast<int>(rng.below(7)) - 1;
    dates[i] = Date::from_days(origin.days_since_epoch() + static_cast<int>(rng.below(400)));
  }
  for (int w = 1; w <= 4; ++w) {
    const auto bins = assign_bins(dates, w, origin);
    const auto n = bins_through(origin, Date::from_days(origin.days_since_epoch() + 399), w);
    const auto ts = build_series(labels, bins, 6, w, origin, n);
    std::int64_t all = 0;
    for (std::size_t b = 0; b < n; ++b) {
      std::int64_t sum = ts.outliers[b];
      double share = static_cast<double>(ts.outliers[b]) / static_cast<double>(ts.totals[b]);
      for (std::size_t t = 0; t < 6; ++t) {
        sum += ts.count(t, b);
        share += ts.intensity_at(t, b);
      }
      CHECK(sum == ts.totals[b]);
      CHECK(share == doctest::Approx(1.0));
      all += sum;
    }
    CHECK(all == 2000);
  }
}

TEST_CASE("range slicing goes by bin start") {
  const auto ts = small_series();
  const std::vector<int> ids{0, 1};
  auto s = series_for_topics(ts, ids, {day(2020, 1, 7), day(2020, 1, 20)});
  REQUIRE(s.size() == 2);
  REQUIRE(s[0].points.size() == 2);
  CHECK(s[0].points[0].bin_start.iso() == "2020-01-13");
  CHECK(s[0].points[1].bin_start.iso() == "2020-01-20");
  CHECK(series_for_topics(ts, ids, {day(2019, 1, 1), day(2019, 2, 1)})[0].points.empty());
  CHECK(series_for_topics(ts, ids, {day(2019, 1, 1), day(2030, 1, 1)})[1].points.size() == 4);
  const std::vector<int> bad{2};
  CHECK(error_code([&] { series_for_topics(ts, bad, {day(2020, 1, 1), day(2020, 2, 1)}); }) == Errc::topic_not_found);
}

TEST_CASE("interval medians") {
  const auto ts = small_series();
  // Topic 0 intensities: 1/3, 1/3, 0, 1.
  CHECK(interval_median(ts, 0, {day(2020, 1, 6), day(2020, 2, 2)}) == doctest::Approx(1.0 / 3.0));
  CHECK(interval_median(ts, 0, {day(2020, 1, 13), day(2020, 1, 27)}) == doctest::Approx(1.0 / 3.0));
  CHECK(interval_median(ts, 0, {day(2020, 1, 20), day(2020, 1, 27)}) == doctest::Approx(0.5));
  CHECK(error_code([&] { interval_median(ts, 0, {day(2020, 1, 7), day(2020, 1, 12)}); }) ==
        Errc::no_bins_in_interval);
}

TEST_CASE("two-month intervals and the heatmap") {
  const auto iv = month_intervals({day(2020, 1, 15), day(2020, 6, 10)}, 2);
  REQUIRE(iv.size() == 3);
  CHECK(iv[0].start.iso() == "2020-01-15");
  CHECK(iv[0].end.iso() == "2020-03-14");
  CHECK(iv[1].start.iso() == "2020-03-15");
  CHECK(iv[2].end.iso() == "2020-06-10");
  const auto eom = month_intervals({day(2020, 1, 31), day(2020, 5, 1)}, 1);
  CHECK(eom[1].start.iso() == "2020-02-29");

  const auto ts = small_series();
  const std::vector<DateRange> cols{{day(2020, 1, 6), day(2020, 1, 19)}, {day(2020, 3, 1), day(2020, 3, 31)}};
  CHECK(heatmap_csv(ts, cols) ==
        "topic,2020-01-06..2020-01-19,2020-03-01..2020-03-31\n"
        "0,333.3333,\n"
        "1,333.3333,\n");
}

TEST_CASE("overlay files") {
  const auto dir = synth::scratch_dir("overlay");
  {
    std::ofstream(dir / "cases.csv") << "date,value\n2020-03-02,5\n2020-03-01,2.5\n";
    std::ofstream(dir / "events.csv") << "2020-03-11,WHO declares pandemic\n2020-03-11,second\n2020-01-01,first\n";
    std::ofstream(dir / "bad.csv") << "date,value\n2020-03-01,-1\n";
    std::ofstream(dir / "badday.csv") << "2020-03,1\n";
  }
  const auto o = load_overlays(dir / "cases.csv", dir / "events.csv");
  REQUIRE(o.cases.size() == 2);
  CHECK(o.cases[0].date.iso() == "2020-03-01");
  CHECK(o.cases[0].value == 2.5);
  REQUIRE(o.events.size() == 3);
  CHECK(o.events[0].label == "first");
  CHECK(o.events[1].label == "WHO declares pandemic");
  CHECK(o.events[2].label == "second");
  CHECK(load_overlays({}, {}) == OverlaySeries{});

  const auto sliced = slice_overlays(o, {day(2020, 3, 2), day(2020, 3, 31)});
  CHECK(sliced.cases.size() == 1);
  CHECK(sliced.events.size() == 2);

  try {
    load_cases(dir / "bad.csv");
    FAIL("expected parse_error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::parse_error);
    CHECK(std::string(e.what()).find("bad.csv:2") != std::string::npos);
  }
  CHECK(error_code([&] { load_cases(dir / "badday.csv"); }) == Errc::parse_error);
  CHECK(error_code([&] { load_events(dir / "absent.csv"); }) == Errc::io_error);
}
