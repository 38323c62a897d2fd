#include "topictrend/date.hpp"

#include <charconv>
#include <cstdio>

namespace topictrend {

namespace chr = std::chrono;

Date Date::from_ymd(int y, unsigned m, unsigned d) {
  return Date{chr::sys_days{chr::year{y} / chr::month{m} / chr::day{d}}, DatePrecision::day};
}

Date Date::from_days(int days) {
  return Date{chr::sys_days{chr::days{days}}, DatePrecision::day};
}

std::string Date::iso() const {
  auto ymd = this->ymd();
  char buf[16];
  switch (precision) {
    case DatePrecision::year:
      std::snprintf(buf, sizeof buf, "%04d", static_cast<int>(ymd.year()));
      break;
    case DatePrecision::month:
      std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(ymd.year()),
                    static_cast<unsigned>(ymd.month()));
      break;
    case DatePrecision::day:
      return iso_day();
  }
  return buf;
}

std::string Date::iso_day() const {
  auto ymd = this->ymd();
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

namespace {

bool parse_digits(std::string_view s, int& out) {
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);

  int y = 0, m = 1, d = 1;
  DatePrecision precision;
  if (text.size() == 4) {
    precision = DatePrecision::year;
    if (!parse_digits(text, y)) return std::nullopt;
  } else if (text.size() == 7 && text[4] == '-') {
    precision = DatePrecision::month;
    if (!parse_digits(text.substr(0, 4), y) || !parse_digits(text.substr(5, 2), m))
      return std::nullopt;
  } else if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
    precision = DatePrecision::day;
    if (!parse_digits(text.substr(0, 4), y) || !parse_digits(text.substr(5, 2), m) ||
        !parse_digits(text.substr(8, 2), d))
      return std::nullopt;
  } else {
    return std::nullopt;
  }

  chr::year_month_day ymd{chr::year{y}, chr::month{static_cast<unsigned>(m)},
                          chr::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Date{chr::sys_days{ymd}, precision};
}

std::optional<Date> parse_day(std::string_view text) {
  auto d = parse_date(text);
  if (!d || d->precision != DatePrecision::day) return std::nullopt;
  return d;
}

}  // namespace topictrend
