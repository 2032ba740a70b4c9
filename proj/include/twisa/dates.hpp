#pragma once

#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "twisa/error.hpp"

namespace twisa {

using Timestamp = std::chrono::sys_seconds;
using Day = std::chrono::sys_days;

namespace detail {

inline bool read_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

}  // namespace detail

/// Parses YYYY-MM-DD.
inline std::optional<Day> parse_day(std::string_view s) {
  int y = 0, m = 0, d = 0;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!detail::read_digits(s, 0, 4, y) || !detail::read_digits(s, 5, 2, m) ||
      !detail::read_digits(s, 8, 2, d))
    return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                  std::chrono::day{unsigned(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Day{ymd};
}

/// Parses an ISO-8601 timestamp `YYYY-MM-DDTHH:MM:SS[.fff][Z|+HH:MM|-HH:MM]`
/// and converts it to UTC. A missing zone designator is read as UTC.
/// Fractional seconds are truncated.
inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
  if (s.size() < 19) return std::nullopt;
  auto day = parse_day(s.substr(0, 10));
  if (!day || (s[10] != 'T' && s[10] != 't' && s[10] != ' ')) return std::nullopt;
  int hh = 0, mm = 0, ss = 0;
  if (!detail::read_digits(s, 11, 2, hh) || s[13] != ':' || !detail::read_digits(s, 14, 2, mm) ||
      s[16] != ':' || !detail::read_digits(s, 17, 2, ss))
    return std::nullopt;
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    std::size_t start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == start) return std::nullopt;
  }
  int offset_minutes = 0;
  if (pos < s.size()) {
    char c = s[pos];
    if (c == 'Z' || c == 'z') {
      ++pos;
    } else if (c == '+' || c == '-') {
      int oh = 0, om = 0;
      if (!detail::read_digits(s, pos + 1, 2, oh)) return std::nullopt;
      std::size_t next = pos + 3;
      if (next < s.size() && s[next] == ':') ++next;
      if (!detail::read_digits(s, next, 2, om)) return std::nullopt;
      if (oh > 23 || om > 59) return std::nullopt;
      offset_minutes = (oh * 60 + om) * (c == '+' ? 1 : -1);
      pos = next + 2;
    } else {
      return std::nullopt;
    }
  }
  if (pos != s.size()) return std::nullopt;
  using namespace std::chrono;
  return Timestamp{*day} + hours{hh} + minutes{mm} + seconds{ss} - minutes{offset_minutes};
}

inline Day day_of(Timestamp t) { return std::chrono::floor<std::chrono::days>(t); }

inline std::string format_day(Day d) {
  std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                unsigned(ymd.day()));
  return buf;
}

inline std::string format_timestamp(Timestamp t) {
  Day d = day_of(t);
  std::chrono::hh_mm_ss tod{t - d};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_day(d).c_str(),
                int(tod.hours().count()), int(tod.minutes().count()), int(tod.seconds().count()));
  return buf;
}

/// Inclusive calendar-day range.
class DateWindow {
 public:
  DateWindow(Day start, Day end) : start_(start), end_(end) {
    if (end < start)
      throw Error(ErrorKind::Validation,
                  "window end " + format_day(end) + " precedes start " + format_day(start));
  }

  Day start() const { return start_; }
  Day end() const { return end_; }
  std::size_t day_count() const { return std::size_t((end_ - start_).count()) + 1; }
  bool contains(Day d) const { return d >= start_ && d <= end_; }
  std::size_t index_of(Day d) const { return std::size_t((d - start_).count()); }
  Day day(std::size_t index) const { return start_ + std::chrono::days(index); }

 private:
  Day start_;
  Day end_;
};

}  // namespace twisa
