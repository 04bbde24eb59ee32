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
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "odmap/calendar.hpp"

namespace odmap {

struct InterchangeRecord {
  std::string ic_id;
  std::string name;
  double longitude = 0.0;
  double latitude = 0.0;

  bool operator==(const InterchangeRecord&) const = default;
};

/// The interchange universe. Index k is the position of an IC after sorting
/// by (longitude, latitude, ic_id), so any permutation of the same entries
/// produces the same indices.
class IcRegistry {
 public:
  IcRegistry() = default;

  /// Throws Error(DuplicateIc) naming the duplicate, or InvalidArgument for
  /// empty ids and out-of-range coordinates.
  static IcRegistry build(std::vector<InterchangeRecord> entries);

  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<InterchangeRecord>& entries() const noexcept { return entries_; }
  const InterchangeRecord& at(std::uint32_t index) const { return entries_.at(index); }
  std::optional<std::uint32_t> index_of(std::string_view ic_id) const;
  /// Like index_of but throws Error(UnknownIc).
  std::uint32_t require(std::string_view ic_id) const;

 private:
  std::vector<InterchangeRecord> entries_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

enum class TimeCategory : std::uint16_t { Unspecified = 0, Specified = 1 };

const char* category_name(TimeCategory category) noexcept;
std::optional<TimeCategory> parse_category(std::string_view text) noexcept;

struct SearchRecord {
  DateTime search_time;
  std::string departure_ic;
  std::string arrival_ic;
  std::optional<DateTime> specified_time;

  bool operator==(const SearchRecord&) const = default;
};

struct RecordFormat {
  char delimiter = ',';
};

/// Parses one log row `search_time,departure_ic,arrival_ic,specified_time`.
/// Throws ParseError carrying `line_number` and the reason.
SearchRecord parse_record(std::string_view line, const RecordFormat& format = {},
                          std::size_t line_number = 0);

/// Normalized serialization; inverse of parse_record for minute-precision input.
std::string format_record(const SearchRecord& record, const RecordFormat& format = {});

/// Specified iff a specified time exists and is strictly later than the search time.
TimeCategory classify(const SearchRecord& record) noexcept;

/// The timestamp that decides the day a record is counted on.
const DateTime& effective_timestamp(const SearchRecord& record, TimeCategory category) noexcept;

/// Splits one CSV row. Double-quoted fields may contain the delimiter and
/// doubled quotes; no multi-line fields.
std::vector<std::string> split_csv_row(std::string_view line, char delimiter = ',');

/// Registry CSV `ic_id,name,longitude,latitude`. A first row whose longitude
/// column is not numeric is treated as a header.
IcRegistry read_registry_csv(std::istream& in);
IcRegistry load_registry_csv(const std::string& path);
void write_registry_csv(std::ostream& out, const IcRegistry& registry);

}  // namespace odmap
