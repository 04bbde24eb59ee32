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

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "odmap/tensor.hpp"

namespace odmap {

/// Half-open day-index range [start, end).
struct DayRange {
  std::uint32_t start = 0;
  std::uint32_t end = 0;

  std::uint32_t length() const noexcept { return end - start; }
  bool operator==(const DayRange&) const = default;
};

DayRange full_range(const OdTensor& tensor) noexcept;

/// Inclusive calendar dates within `year` to a half-open day range.
/// Throws Error(InvalidRange) if either date is outside the year or from > to.
DayRange date_range(int year, const Date& from, const Date& to);

/// Throws Error(InvalidRange) unless 0 <= start <= end <= n_days.
void check_range(const OdTensor& tensor, DayRange range);

/// Day-summed origin x destination matrix.
struct OdMatrix {
  std::uint32_t n_ics = 0;
  int year = 0;
  TimeCategory category = TimeCategory::Unspecified;
  DayRange range;
  std::vector<std::uint64_t> values;  // row-major, origin-major

  std::uint64_t at(std::uint32_t origin, std::uint32_t destination) const {
    return values.at(static_cast<std::size_t>(origin) * n_ics + destination);
  }
  bool operator==(const OdMatrix&) const = default;
};

struct DaySeries {
  int year = 0;
  DayRange range;
  std::vector<std::uint64_t> values;
  std::string label;

  bool operator==(const DaySeries&) const = default;
};

struct RankedOrigin {
  std::uint32_t origin = 0;
  std::string ic_id;
  std::uint64_t count = 0;

  bool operator==(const RankedOrigin&) const = default;
};

/// result[j] = sum over origins and days in range of S[i][j][t].
std::vector<std::uint64_t> aggregate_over_origin(const OdTensor& tensor, DayRange range);

/// values[i][j] = sum over days in [start, end) of S[i][j][t].
OdMatrix slice_time(const OdTensor& tensor, DayRange range);

/// Per-day arrivals summed over a destination set.
DaySeries destination_series(const OdTensor& tensor, std::span<const std::string> dest_ids,
                             DayRange range, const IcRegistry& registry);

/// Origins ranked by descending count toward `dest_id`, ties by ascending
/// origin index; zero-count origins omitted; at most k entries.
std::vector<RankedOrigin> top_k_origins(const OdTensor& tensor, const std::string& dest_id,
                                        DayRange range, std::uint32_t k,
                                        const IcRegistry& registry);

std::uint64_t total(const OdTensor& tensor) noexcept;

/// Throws Error(Mismatch) unless the registry size equals tensor.n_ics().
void check_registry(const OdTensor& tensor, const IcRegistry& registry);

// CSV renderings, each with a header row.
void write_series_csv(std::ostream& out, const DaySeries& series);        // day_index,date,count
void write_top_k_csv(std::ostream& out, std::span<const RankedOrigin> r);  // rank,origin_ic,count
void write_matrix_csv(std::ostream& out, const OdMatrix& matrix);         // i,j,count (nonzero)
void write_destination_totals_csv(std::ostream& out, std::span<const std::uint64_t> totals,
                                  const IcRegistry& registry);            // dest_index,dest_ic,count

}  // namespace odmap
