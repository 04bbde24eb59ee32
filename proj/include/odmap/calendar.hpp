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

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace odmap {

// Naive local calendar types. No timezone arithmetic is ever performed.

struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  auto operator<=>(const Date&) const = default;
};

/// Calendar datetime at minute precision.
struct DateTime {
  Date date;
  int hour = 0;
  int minute = 0;

  auto operator<=>(const DateTime&) const = default;
};

/// Month and day without a year, as used by season windows ("03-15").
struct MonthDay {
  int month = 1;
  int day = 1;

  auto operator<=>(const MonthDay&) const = default;
};

bool is_leap_year(int year) noexcept;
int days_in_year(int year) noexcept;
int days_in_month(int year, int month) noexcept;
bool is_valid(const Date& date) noexcept;

/// Days since 1970-01-01 (proleptic Gregorian).
std::int64_t to_days(const Date& date) noexcept;
Date from_days(std::int64_t days) noexcept;

/// Minutes since 1970-01-01T00:00.
std::int64_t to_minutes(const DateTime& dt) noexcept;
DateTime from_minutes(std::int64_t minutes) noexcept;

/// Whole days elapsed since January 1st of `year`; nullopt when the
/// timestamp falls in a different year.
std::optional<std::uint32_t> day_index(const DateTime& ts, int year) noexcept;
std::optional<std::uint32_t> day_index(const Date& date, int year) noexcept;

/// Date of January 1st + `index` days. `index` must be < days_in_year(year).
Date date_at(int year, std::uint32_t index) noexcept;

/// 0 = Sunday .. 6 = Saturday.
int weekday(const Date& date) noexcept;
bool is_weekend(const Date& date) noexcept;

/// Strict parsers. Datetimes accept `YYYY-MM-DDTHH:MM` with optional `:SS`,
/// which is validated and then truncated.
std::optional<Date> parse_date(std::string_view text) noexcept;
std::optional<DateTime> parse_datetime(std::string_view text) noexcept;
/// `MM-DD` or `MMDD`; February 29 is accepted.
std::optional<MonthDay> parse_month_day(std::string_view text) noexcept;

std::string format_date(const Date& date);
std::string format_datetime(const DateTime& dt);
std::string format_month_day(const MonthDay& md);

}  // namespace odmap
