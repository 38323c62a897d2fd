#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace topictrend {

enum class DatePrecision { day, month, year };

// A calendar date with the precision it was declared with. Imprecise dates are
// anchored to the first day of their month or year.
struct Date {
  std::chrono::sys_days day{};
  DatePrecision precision = DatePrecision::day;

  static Date from_ymd(int y, unsigned m, unsigned d);

  int days_since_epoch() const { return day.time_since_epoch().count(); }
  static Date from_days(int days);

  std::chrono::year_month_day ymd() const { return std::chrono::year_month_day{day}; }
  int year() const { return static_cast<int>(ymd().year()); }
  unsigned month() const { return static_cast<unsigned>(ymd().month()); }

  // "YYYY-MM-DD", "YYYY-MM" or "YYYY" depending on precision.
  std::string iso() const;
  // "YYYY-MM-DD" regardless of precision.
  std::string iso_day() const;

  friend bool operator==(const Date& a, const Date& b) = default;
  friend auto operator<=>(const Date& a, const Date& b) {
    if (auto c = a.day <=> b.day; c != 0) return c;
    return a.precision <=> b.precision;
  }
};

// Parses ISO-8601 "YYYY-MM-DD", "YYYY-MM" or "YYYY". Returns nullopt for
// anything else, including out-of-range calendar fields.
std::optional<Date> parse_date(std::string_view text);

// Like parse_date but only accepts day precision.
std::optional<Date> parse_day(std::string_view text);

struct DateRange {
  Date start;
  Date end;  // inclusive

  bool contains(const Date& d) const { return d.day >= start.day && d.day <= end.day; }
  bool overlaps(const DateRange& other) const {
    return start.day <= other.end.day && other.start.day <= end.day;
  }
};

}  // namespace topictrend
