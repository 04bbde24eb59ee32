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

#include "odmap/trend.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "odmap/error.hpp"

namespace odmap {

namespace {

std::vector<std::string> split_ids(const std::string& text) {
  std::vector<std::string> ids;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(';', start);
    std::string id = text.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    if (!id.empty()) ids.push_back(std::move(id));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return ids;
}

Date clamp_to_year(const MonthDay& md, int year) {
  if (md.month == 2 && md.day == 29 && !is_leap_year(year)) return Date{year, 2, 28};
  return Date{year, md.month, md.day};
}

std::string month_day_of(int year, std::uint32_t t) {
  const Date d = date_at(year, t);
  return format_month_day(MonthDay{d.month, d.day});
}

}  // namespace

DayRange window_range(const SeasonWindow& window, int year) {
  Date from = clamp_to_year(window.start, year);
  if (window.start.month == 2 && window.start.day == 29 && !is_leap_year(year)) from = Date{year, 3, 1};
  const Date to = clamp_to_year(window.end, year);
  return date_range(year, from, to);
}

std::vector<SeasonWindow> read_season_presets(std::istream& in) {
  std::vector<SeasonWindow> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    auto fields = split_csv_row(line);
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != 4) {
      throw ParseError(line_number, "season preset needs 4 columns, found " +
                                        std::to_string(fields.size()));
    }
    auto start = parse_month_day(fields[1]);
    auto end = parse_month_day(fields[2]);
    if (!start || !end) {
      if (line_number == 1) continue;  // header
      throw ParseError(line_number, "malformed month-day in season preset");
    }
    if (*end < *start) throw ParseError(line_number, "season window ends before it starts");
    SeasonWindow w{fields[0], *start, *end, split_ids(fields[3])};
    if (w.dest_ids.empty()) throw ParseError(line_number, "season preset has no destination ids");
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<SeasonWindow> load_season_presets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open season presets " + path);
  return read_season_presets(in);
}

void write_season_presets(std::ostream& out, std::span<const SeasonWindow> windows) {
  out << "label,start_mmdd,end_mmdd,dest_ic_ids\n";
  for (const auto& w : windows) {
    out << w.label << ',' << format_month_day(w.start) << ',' << format_month_day(w.end) << ',';
    for (std::size_t k = 0; k < w.dest_ids.size(); ++k) out << (k ? ";" : "") << w.dest_ids[k];
    out << '\n';
  }
}

const SeasonWindow& find_preset(std::span<const SeasonWindow> presets, const std::string& label) {
  for (const auto& w : presets) {
    if (w.label == label) return w;
  }
  throw Error(ErrorCode::InvalidArgument, "no season preset labeled '" + label + "'");
}

HolidayCalendar read_holidays(std::istream& in) {
  HolidayCalendar out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    auto d = parse_date(line);
    if (!d) {
      if (line_number == 1 && line == "date") continue;
      throw ParseError(line_number, "malformed holiday date '" + line + "'");
    }
    out.insert(*d);
  }
  return out;
}

HolidayCalendar load_holidays(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open holiday file " + path);
  return read_holidays(in);
}

std::array<std::uint64_t, 12> monthly_totals(const OdTensor& tensor) {
  std::array<std::uint64_t, 12> months{};
  for (std::uint32_t t = 0; t < tensor.n_days(); ++t) {
    std::uint64_t sum = 0;
    for (const auto& c : tensor.day(t)) sum += c.count;
    months[static_cast<std::size_t>(date_at(tensor.year(), t).month - 1)] += sum;
  }
  return months;
}

std::vector<bool> weekend_mask(int year) {
  const auto n = static_cast<std::uint32_t>(days_in_year(year));
  std::vector<bool> mask(n);
  for (std::uint32_t t = 0; t < n; ++t) mask[t] = is_weekend(date_at(year, t));
  return mask;
}

std::vector<AnnotatedSeries> season_series(std::span<const OdTensor> tensors,
                                           const SeasonWindow& window,
                                           const IcRegistry& registry,
                                           const HolidayCalendar* holidays,
                                           TimeCategory category, std::span<const int> years) {
  std::vector<int> wanted(years.begin(), years.end());
  if (wanted.empty()) {
    for (const auto& t : tensors) {
      if (t.category() == category) wanted.push_back(t.year());
    }
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
    if (wanted.empty()) {
      throw Error(ErrorCode::MissingYear,
                  std::string("no ") + category_name(category) + " tensors supplied");
    }
  }
  std::vector<AnnotatedSeries> out;
  for (int year : wanted) {
    auto it = std::find_if(tensors.begin(), tensors.end(), [&](const OdTensor& t) {
      return t.year() == year && t.category() == category;
    });
    if (it == tensors.end()) {
      throw Error(ErrorCode::MissingYear, std::string("no ") + category_name(category) +
                                              " tensor for year " + std::to_string(year));
    }
    const DayRange range = window_range(window, year);
    AnnotatedSeries a;
    a.series = destination_series(*it, window.dest_ids, range, registry);
    a.series.label = window.label;
    const auto mask = weekend_mask(year);
    a.weekend.assign(mask.begin() + range.start, mask.begin() + range.end);
    a.holiday.assign(range.length(), false);
    if (holidays) {
      for (std::uint32_t t = range.start; t < range.end; ++t) {
        a.holiday[t - range.start] = holidays->count(date_at(year, t)) > 0;
      }
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<PeakDay> peak_days(const DaySeries& series, std::uint32_t k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  std::vector<PeakDay> days;
  days.reserve(series.values.size());
  for (std::uint32_t n = 0; n < series.values.size(); ++n) {
    days.push_back({series.range.start + n, series.values[n]});
  }
  const std::size_t keep = std::min<std::size_t>(k, days.size());
  std::partial_sort(days.begin(), days.begin() + static_cast<std::ptrdiff_t>(keep), days.end(),
                    [](const PeakDay& a, const PeakDay& b) {
                      return a.count != b.count ? a.count > b.count : a.day_index < b.day_index;
                    });
  days.resize(keep);
  return days;
}

YearOverYear year_over_year(std::span<const DaySeries> series_by_year) {
  if (series_by_year.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "year-over-year needs at least two series");
  }
  const auto& first = series_by_year.front();
  auto window_of = [](const DaySeries& s) {
    if (s.range.length() == 0) return std::string("empty");
    return month_day_of(s.year, s.range.start) + ".." + month_day_of(s.year, s.range.end - 1);
  };
  const std::string ref = window_of(first);
  YearOverYear yoy;
  for (const auto& s : series_by_year) {
    if (window_of(s) != ref) {
      throw Error(ErrorCode::Mismatch, "series for " + std::to_string(s.year) + " covers " +
                                           window_of(s) + ", expected " + ref);
    }
    std::uint64_t sum = 0;
    for (auto v : s.values) sum += v;
    yoy.years.push_back(s.year);
    yoy.totals.push_back(sum);
  }
  for (std::size_t k = 1; k < yoy.totals.size(); ++k) {
    if (yoy.totals[k - 1] == 0) {
      yoy.ratios.emplace_back();
    } else {
      yoy.ratios.emplace_back(static_cast<double>(yoy.totals[k]) / static_cast<double>(yoy.totals[k - 1]));
    }
  }
  return yoy;
}

void write_annotated_csv(std::ostream& out, const AnnotatedSeries& s) {
  out << "date,count,is_weekend,is_holiday\n";
  for (std::size_t k = 0; k < s.series.values.size(); ++k) {
    const auto t = static_cast<std::uint32_t>(s.series.range.start + k);
    out << format_date(date_at(s.series.year, t)) << ',' << s.series.values[k] << ','
        << (s.weekend[k] ? 1 : 0) << ',' << (s.holiday[k] ? 1 : 0) << '\n';
  }
}

void write_monthly_csv(std::ostream& out, const std::array<std::uint64_t, 12>& months) {
  out << "month,count\n";
  for (std::size_t m = 0; m < months.size(); ++m) out << (m + 1) << ',' << months[m] << '\n';
}

void write_peaks_csv(std::ostream& out, int year, std::span<const PeakDay> peaks) {
  out << "rank,day_index,date,count\n";
  for (std::size_t r = 0; r < peaks.size(); ++r) {
    out << (r + 1) << ',' << peaks[r].day_index << ','
        << format_date(date_at(year, peaks[r].day_index)) << ',' << peaks[r].count << '\n';
  }
}

void write_yoy_csv(std::ostream& out, const YearOverYear& yoy) {
  out << "year,total,ratio\n";
  char buf[32];
  for (std::size_t k = 0; k < yoy.years.size(); ++k) {
    out << yoy.years[k] << ',' << yoy.totals[k] << ',';
    if (k > 0 && yoy.ratios[k - 1]) {
      std::snprintf(buf, sizeof(buf), "%.6f", *yoy.ratios[k - 1]);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace odmap
