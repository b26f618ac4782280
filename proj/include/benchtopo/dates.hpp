#pragma once

#include <charconv>
#include <chrono>
#include <stdexcept>
#include <string>
#include <string_view>

namespace benchtopo {

using Date = std::chrono::year_month_day;

namespace detail {
inline bool parse_int(std::string_view s, int& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}
}  // namespace detail

/// Parse an ISO-8601 date. Year-month and year-only forms are completed to
/// the first day of the period; `completed` is set when that happens.
inline Date parse_date(std::string_view s, bool* completed = nullptr) {
  if (completed) *completed = false;
  int y = 0, m = 1, d = 1;
  auto fail = [&]() -> Date {
    throw std::invalid_argument("unparseable date: '" + std::string(s) + "'");
  };
  if (s.size() == 10 && s[4] == '-' && s[7] == '-') {
    if (!detail::parse_int(s.substr(0, 4), y) || !detail::parse_int(s.substr(5, 2), m) ||
        !detail::parse_int(s.substr(8, 2), d))
      fail();
  } else if (s.size() == 7 && s[4] == '-') {
    if (!detail::parse_int(s.substr(0, 4), y) || !detail::parse_int(s.substr(5, 2), m)) fail();
    if (completed) *completed = true;
  } else if (s.size() == 4) {
    if (!detail::parse_int(s, y)) fail();
    if (completed) *completed = true;
  } else {
    fail();
  }
  Date date{std::chrono::year{y}, std::chrono::month{unsigned(m)}, std::chrono::day{unsigned(d)}};
  if (!date.ok()) fail();
  return date;
}

inline std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(d.year()), unsigned(d.month()),
                unsigned(d.day()));
  return buf;
}

inline long days_between(Date from, Date to) {
  return (std::chrono::sys_days{to} - std::chrono::sys_days{from}).count();
}

/// Fractional years between two dates, days / 365.25.
inline double years_between(Date from, Date to) {
  return static_cast<double>(days_between(from, to)) / 365.25;
}

}  // namespace benchtopo
