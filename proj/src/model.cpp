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

#include "odmap/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <tuple>

#include "odmap/error.hpp"

namespace odmap {

namespace {

std::string_view trim_cr(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  return line;
}

std::optional<double> parse_double(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

void write_csv_field(std::ostream& out, const std::string& field) {
  if (field.find_first_of(",\"") == std::string::npos) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace

IcRegistry IcRegistry::build(std::vector<InterchangeRecord> entries) {
  for (const auto& e : entries) {
    if (e.ic_id.empty()) throw Error(ErrorCode::InvalidArgument, "interchange with empty ic_id");
    if (!(e.longitude >= -180.0 && e.longitude <= 180.0) ||
        !(e.latitude >= -90.0 && e.latitude <= 90.0)) {
      throw Error(ErrorCode::InvalidArgument, "coordinates out of range for " + e.ic_id);
    }
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return std::tie(a.longitude, a.latitude, a.ic_id) < std::tie(b.longitude, b.latitude, b.ic_id);
  });
  IcRegistry reg;
  reg.index_.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    auto [it, inserted] = reg.index_.emplace(entries[k].ic_id, static_cast<std::uint32_t>(k));
    if (!inserted) throw Error(ErrorCode::DuplicateIc, "duplicate ic_id: " + entries[k].ic_id);
  }
  reg.entries_ = std::move(entries);
  return reg;
}

std::optional<std::uint32_t> IcRegistry::index_of(std::string_view ic_id) const {
  auto it = index_.find(std::string(ic_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t IcRegistry::require(std::string_view ic_id) const {
  auto idx = index_of(ic_id);
  if (!idx) throw Error(ErrorCode::UnknownIc, "unknown ic_id: " + std::string(ic_id));
  return *idx;
}

const char* category_name(TimeCategory category) noexcept {
  return category == TimeCategory::Specified ? "specified" : "unspecified";
}

std::optional<TimeCategory> parse_category(std::string_view text) noexcept {
  if (text == "specified" || text == "1") return TimeCategory::Specified;
  if (text == "unspecified" || text == "0") return TimeCategory::Unspecified;
  return std::nullopt;
}

SearchRecord parse_record(std::string_view line, const RecordFormat& format,
                          std::size_t line_number) {
  line = trim_cr(line);
  std::string_view fields[4];
  std::size_t count = 0;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(format.delimiter, start);
    if (count == 4) throw ParseError(line_number, "expected 4 columns, found more");
    fields[count++] = line.substr(start, pos == std::string_view::npos ? pos : pos - start);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (count != 4) {
    throw ParseError(line_number, "expected 4 columns, found " + std::to_string(count));
  }
  SearchRecord rec;
  auto search = parse_datetime(fields[0]);
  if (!search) throw ParseError(line_number, "malformed search_time '" + std::string(fields[0]) + "'");
  rec.search_time = *search;
  if (fields[1].empty()) throw ParseError(line_number, "empty departure IC");
  if (fields[2].empty()) throw ParseError(line_number, "empty arrival IC");
  rec.departure_ic.assign(fields[1]);
  rec.arrival_ic.assign(fields[2]);
  if (!fields[3].empty()) {
    auto spec = parse_datetime(fields[3]);
    if (!spec) {
      throw ParseError(line_number, "malformed specified_time '" + std::string(fields[3]) + "'");
    }
    rec.specified_time = *spec;
  }
  return rec;
}

std::string format_record(const SearchRecord& record, const RecordFormat& format) {
  std::string out = format_datetime(record.search_time);
  out += format.delimiter;
  out += record.departure_ic;
  out += format.delimiter;
  out += record.arrival_ic;
  out += format.delimiter;
  if (record.specified_time) out += format_datetime(*record.specified_time);
  return out;
}

TimeCategory classify(const SearchRecord& record) noexcept {
  if (record.specified_time && *record.specified_time > record.search_time) {
    return TimeCategory::Specified;
  }
  return TimeCategory::Unspecified;
}

const DateTime& effective_timestamp(const SearchRecord& record, TimeCategory category) noexcept {
  if (category == TimeCategory::Specified && record.specified_time) return *record.specified_time;
  return record.search_time;
}

std::vector<std::string> split_csv_row(std::string_view line, char delimiter) {
  line = trim_cr(line);
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          cur += '"';
          ++k;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

IcRegistry read_registry_csv(std::istream& in) {
  std::vector<InterchangeRecord> entries;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim_cr(line).empty()) continue;
    auto fields = split_csv_row(line);
    if (fields.size() != 4) {
      throw ParseError(line_number, "registry row needs 4 columns, found " +
                                        std::to_string(fields.size()));
    }
    auto lon = parse_double(fields[2]);
    auto lat = parse_double(fields[3]);
    if (line_number == 1 && !lon) continue;  // header
    if (!lon || !lat) throw ParseError(line_number, "malformed coordinates");
    entries.push_back({fields[0], fields[1], *lon, *lat});
  }
  return IcRegistry::build(std::move(entries));
}

IcRegistry load_registry_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open registry file " + path);
  return read_registry_csv(in);
}

void write_registry_csv(std::ostream& out, const IcRegistry& registry) {
  out << "ic_id,name,longitude,latitude\n";
  char buf[64];
  for (const auto& e : registry.entries()) {
    write_csv_field(out, e.ic_id);
    out << ',';
    write_csv_field(out, e.name);
    std::snprintf(buf, sizeof(buf), ",%.6f,%.6f\n", e.longitude, e.latitude);
    out << buf;
  }
}

}  // namespace odmap
