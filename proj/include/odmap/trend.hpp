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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "odmap/query.hpp"

namespace odmap {

/// A labeled month-day window (inclusive on both ends) and the destination
/// interchanges whose arrivals it tracks.
struct SeasonWindow {
  std::string label;
  MonthDay start;
  MonthDay end;
  std::vector<std::string> dest_ids;

  bool operator==(const SeasonWindow&) const = default;
};

/// Half-open day range of the window in `year`. A Feb 29 endpoint in a
/// non-leap year is clamped to Feb 28 (start moves to Mar 1).
DayRange window_range(const SeasonWindow& window, int year);

/// `label,start_mmdd,end_mmdd,dest_ic_ids` with semicolon-separated ids.
/// A first row that does not parse as a window is treated as a header.
std::vector<SeasonWindow> read_season_presets(std::istream& in);
std::vector<SeasonWindow> load_season_presets(const std::string& path);
void write_season_presets(std::ostream& out, std::span<const SeasonWindow> windows);
const SeasonWindow& find_preset(std::span<const SeasonWindow> presets, const std::string& label);

using HolidayCalendar = std::set<Date>;

/// One `YYYY-MM-DD` per line; an optional `date` header is skipped.
HolidayCalendar read_holidays(std::istream& in);
HolidayCalendar load_holidays(const std::string& path);

struct AnnotatedSeries {
  DaySeries series;
  std::vector<bool> weekend;
  std::vector<bool> holiday;

  bool operator==(const AnnotatedSeries&) const = default;
};

/// Entry m (0 = January) sums every cell whose day falls in month m.
std::array<std::uint64_t, 12> monthly_totals(const OdTensor& tensor);

/// Entry t is true iff January 1st + t days is a Saturday or Sunday.
std::vector<bool> weekend_mask(int year);

/// One annotated series per year for `window`, drawn from the tensors of
/// `category`. When `years` is empty every year present for that category is
/// used, ascending. Throws Error(MissingYear) if a requested year is absent.
std::vector<AnnotatedSeries> season_series(std::span<const OdTensor> tensors,
                                           const SeasonWindow& window,
                                           const IcRegistry& registry,
                                           const HolidayCalendar* holidays = nullptr,
                                           TimeCategory category = TimeCategory::Specified,
                                           std::span<const int> years = {});

struct PeakDay {
  std::uint32_t day_index = 0;
  std::uint64_t count = 0;

  bool operator==(const PeakDay&) const = default;
};

/// The k highest days, descending by count, ties by ascending day index.
std::vector<PeakDay> peak_days(const DaySeries& series, std::uint32_t k);

struct YearOverYear {
  std::vector<int> years;
  std::vector<std::uint64_t> totals;
  /// ratios[k] = totals[k + 1] / totals[k]; empty when totals[k] is zero.
  std::vector<std::optional<double>> ratios;
};

/// Throws Error(InvalidArgument) for fewer than two series and
/// Error(Mismatch) when the series do not cover the same month-day window.
YearOverYear year_over_year(std::span<const DaySeries> series_by_year);

void write_annotated_csv(std::ostream& out, const AnnotatedSeries& s);  // date,count,is_weekend,is_holiday
void write_monthly_csv(std::ostream& out, const std::array<std::uint64_t, 12>& months);  // month,count
void write_peaks_csv(std::ostream& out, int year, std::span<const PeakDay> peaks);  // rank,day_index,date,count
void write_yoy_csv(std::ostream& out, const YearOverYear& yoy);  // year,total,ratio

}  // namespace odmap
