// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include "climadash/timeutil.hpp"

#include <chrono>
#include <cstdio>

namespace climadash {

namespace {

bool read_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  int v = 0;
  for (std::size_t i = 0; i < n; ++i) {
    char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

}  // namespace

std::optional<EpochMs> parse_rfc3339(std::string_view s) {
  int year, month, day, hour, minute, second;
  // YYYY-MM-DDTHH:MM:SS is 19 characters; a zone designator is mandatory.
  if (s.size() < 20) return std::nullopt;
  if (!read_digits(s, 0, 4, year) || s[4] != '-' ||
      !read_digits(s, 5, 2, month) || s[7] != '-' ||
      !read_digits(s, 8, 2, day)) {
    return std::nullopt;
  }
  if (s[10] != 'T' && s[10] != 't' && s[10] != ' ') return std::nullopt;
  if (!read_digits(s, 11, 2, hour) || s[13] != ':' ||
      !read_digits(s, 14, 2, minute) || s[16] != ':' ||
      !read_digits(s, 17, 2, second)) {
    return std::nullopt;
  }
  if (hour > 23 || minute > 59 || second > 60) return std::nullopt;

  std::size_t pos = 19;
  int millis = 0;
  if (s[pos] == '.') {
    ++pos;
    std::size_t start = pos;
    int scale = 100;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      millis += (s[pos] - '0') * scale;
      scale /= 10;
      ++pos;
    }
    if (pos == start) return std::nullopt;
  }
  if (pos >= s.size()) return std::nullopt;

  int offset_minutes = 0;
  if (s[pos] == 'Z' || s[pos] == 'z') {
    ++pos;
  } else if (s[pos] == '+' || s[pos] == '-') {
    int sign = s[pos] == '-' ? -1 : 1;
    int oh, om;
    if (!read_digits(s, pos + 1, 2, oh) || pos + 3 >= s.size() ||
        s[pos + 3] != ':' || !read_digits(s, pos + 4, 2, om)) {
      return std::nullopt;
    }
    if (oh > 23 || om > 59) return std::nullopt;
    offset_minutes = sign * (oh * 60 + om);
    pos += 6;
  } else {
    return std::nullopt;
  }
  if (pos != s.size()) return std::nullopt;

  using namespace std::chrono;
  year_month_day ymd{std::chrono::year{year},
                     std::chrono::month{static_cast<unsigned>(month)},
                     std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) return std::nullopt;
  auto days = sys_days{ymd}.time_since_epoch().count();
  // Leap seconds fold onto the following second.
  EpochMs total = static_cast<EpochMs>(days) * 86'400'000LL +
                  static_cast<EpochMs>(hour) * 3'600'000LL +
                  static_cast<EpochMs>(minute) * 60'000LL +
                  static_cast<EpochMs>(second) * 1'000LL + millis -
                  static_cast<EpochMs>(offset_minutes) * 60'000LL;
  return total;
}

std::string format_rfc3339(EpochMs ms) {
  using namespace std::chrono;
  EpochMs day_ms = 86'400'000LL;
  EpochMs days = ms / day_ms;
  EpochMs rem = ms % day_ms;
  if (rem < 0) {
    rem += day_ms;
    --days;
  }
  year_month_day ymd{sys_days{std::chrono::days{days}}};
  int h = static_cast<int>(rem / 3'600'000LL);
  int m = static_cast<int>(rem / 60'000LL % 60);
  int s = static_cast<int>(rem / 1'000LL % 60);
  int milli = static_cast<int>(rem % 1'000LL);
  char buf[40];
  if (milli != 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ",
                  static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), h, m, s, milli);
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                  static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), h, m, s);
  }
  return buf;
}

EpochMs wall_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch())
      .count();
}

}  // namespace climadash
