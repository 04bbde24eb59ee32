// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "odmap/calendar.hpp"

#include <charconv>
#include <cstdio>

namespace odmap {

namespace {

bool parse_fixed(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) return false;
  for (std::size_t k = pos; k < pos + len; ++k) {
    if (text[k] < '0' || text[k] > '9') return false;
  }
  auto res = std::from_chars(text.data() + pos, text.data() + pos + len, out);
  return res.ec == std::errc();
}

}  // namespace

bool is_leap_year(int year) noexcept {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_year(int year) noexcept { return is_leap_year(year) ? 366 : 365; }

int days_in_month(int year, int month) noexcept {
  static constexpr int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month < 1 || month > 12) return 0;
  if (month == 2 && is_leap_year(year)) return 29;
  return kDays[month - 1];
}

bool is_valid(const Date& date) noexcept {
  return date.month >= 1 && date.month <= 12 && date.day >= 1 &&
         date.day <= days_in_month(date.year, date.month);
}

// Howard Hinnant's days_from_civil / civil_from_days.
std::int64_t to_days(const Date& date) noexcept {
  const std::int64_t y = date.year - (date.month <= 2 ? 1 : 0);
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const std::int64_t yoe = y - era * 400;
  const std::int64_t mp = (date.month + 9) % 12;
  const std::int64_t doy = (153 * mp + 2) / 5 + date.day - 1;
  const std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

Date from_days(std::int64_t days) noexcept {
  const std::int64_t z = days + 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const std::int64_t doe = z - era * 146097;
  const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const std::int64_t mp = (5 * doy + 2) / 153;
  const int d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  const int m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
  const int y = static_cast<int>(yoe + era * 400 + (m <= 2 ? 1 : 0));
  return Date{y, m, d};
}

std::int64_t to_minutes(const DateTime& dt) noexcept {
  return to_days(dt.date) * 1440 + dt.hour * 60 + dt.minute;
}

DateTime from_minutes(std::int64_t minutes) noexcept {
  std::int64_t days = minutes / 1440;
  std::int64_t rem = minutes % 1440;
  if (rem < 0) {
    rem += 1440;
    --days;
  }
  return DateTime{from_days(days), static_cast<int>(rem / 60), static_cast<int>(rem % 60)};
}

std::optional<std::uint32_t> day_index(const Date& date, int year) noexcept {
  if (date.year != year) return std::nullopt;
  return static_cast<std::uint32_t>(to_days(date) - to_days(Date{year, 1, 1}));
}

std::optional<std::uint32_t> day_index(const DateTime& ts, int year) noexcept {
  return day_index(ts.date, year);
}

Date date_at(int year, std::uint32_t index) noexcept {
  return from_days(to_days(Date{year, 1, 1}) + index);
}

int weekday(const Date& date) noexcept {
  // 1970-01-01 was a Thursday.
  const std::int64_t d = to_days(date);
  return static_cast<int>(((d + 4) % 7 + 7) % 7);
}

bool is_weekend(const Date& date) noexcept {
  const int wd = weekday(date);
  return wd == 0 || wd == 6;
}

std::optional<Date> parse_date(std::string_view text) noexcept {
  Date d;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  if (!parse_fixed(text, 0, 4, d.year) || !parse_fixed(text, 5, 2, d.month) ||
      !parse_fixed(text, 8, 2, d.day)) {
    return std::nullopt;
  }
  if (!is_valid(d)) return std::nullopt;
  return d;
}

std::optional<DateTime> parse_datetime(std::string_view text) noexcept {
  if (text.size() != 16 && text.size() != 19) return std::nullopt;
  auto date = parse_date(text.substr(0, 10));
  if (!date || (text[10] != 'T' && text[10] != ' ') || text[13] != ':') return std::nullopt;
  DateTime dt{*date, 0, 0};
  if (!parse_fixed(text, 11, 2, dt.hour) || !parse_fixed(text, 14, 2, dt.minute)) {
    return std::nullopt;
  }
  if (dt.hour > 23 || dt.minute > 59) return std::nullopt;
  if (text.size() == 19) {
    int seconds = 0;
    if (text[16] != ':' || !parse_fixed(text, 17, 2, seconds) || seconds > 59) {
      return std::nullopt;
    }
  }
  return dt;
}

std::optional<MonthDay> parse_month_day(std::string_view text) noexcept {
  MonthDay md;
  if (text.size() == 5 && text[2] == '-') {
    if (!parse_fixed(text, 0, 2, md.month) || !parse_fixed(text, 3, 2, md.day)) {
      return std::nullopt;
    }
  } else if (text.size() == 4) {
    if (!parse_fixed(text, 0, 2, md.month) || !parse_fixed(text, 2, 2, md.day)) {
      return std::nullopt;
    }
  } else {
    return std::nullopt;
  }
  // 2000 is a leap year, so Feb 29 passes here.
  if (!is_valid(Date{2000, md.month, md.day})) return std::nullopt;
  return md;
}

std::string format_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", date.year, date.month, date.day);
  return buf;
}

std::string format_datetime(const DateTime& dt) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d", dt.date.year, dt.date.month,
                dt.date.day, dt.hour, dt.minute);
  return buf;
}

std::string format_month_day(const MonthDay& md) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%02d-%02d", md.month, md.day);
  return buf;
}

}  // namespace odmap
