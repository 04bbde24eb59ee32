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

#include "odmap/query.hpp"

#include <algorithm>
#include <ostream>

#include "odmap/error.hpp"

namespace odmap {

DayRange full_range(const OdTensor& tensor) noexcept { return DayRange{0, tensor.n_days()}; }

DayRange date_range(int year, const Date& from, const Date& to) {
  auto s = day_index(from, year);
  auto e = day_index(to, year);
  if (!s || !e) {
    throw Error(ErrorCode::InvalidRange, "dates " + format_date(from) + ".." + format_date(to) +
                                             " are not within year " + std::to_string(year));
  }
  if (*s > *e) {
    throw Error(ErrorCode::InvalidRange, "start date " + format_date(from) + " is after end date " +
                                             format_date(to));
  }
  return DayRange{*s, *e + 1};
}

void check_range(const OdTensor& tensor, DayRange range) {
  if (range.start > range.end || range.end > tensor.n_days()) {
    throw Error(ErrorCode::InvalidRange, "day range [" + std::to_string(range.start) + ", " +
                                             std::to_string(range.end) + ") outside [0, " +
                                             std::to_string(tensor.n_days()) + ")");
  }
}

void check_registry(const OdTensor& tensor, const IcRegistry& registry) {
  if (registry.size() != tensor.n_ics()) {
    throw Error(ErrorCode::Mismatch, "registry has " + std::to_string(registry.size()) +
                                         " interchanges but tensor has " +
                                         std::to_string(tensor.n_ics()));
  }
}

std::vector<std::uint64_t> aggregate_over_origin(const OdTensor& tensor, DayRange range) {
  check_range(tensor, range);
  std::vector<std::uint64_t> out(tensor.n_ics(), 0);
  for (std::uint32_t t = range.start; t < range.end; ++t) {
    for (const auto& c : tensor.day(t)) out[c.destination] += c.count;
  }
  return out;
}

OdMatrix slice_time(const OdTensor& tensor, DayRange range) {
  check_range(tensor, range);
  OdMatrix m;
  m.n_ics = tensor.n_ics();
  m.year = tensor.year();
  m.category = tensor.category();
  m.range = range;
  m.values.assign(static_cast<std::size_t>(m.n_ics) * m.n_ics, 0);
  for (std::uint32_t t = range.start; t < range.end; ++t) {
    for (const auto& c : tensor.day(t)) {
      m.values[static_cast<std::size_t>(c.origin) * m.n_ics + c.destination] += c.count;
    }
  }
  return m;
}

DaySeries destination_series(const OdTensor& tensor, std::span<const std::string> dest_ids,
                             DayRange range, const IcRegistry& registry) {
  check_range(tensor, range);
  check_registry(tensor, registry);
  std::vector<char> wanted(tensor.n_ics(), 0);
  std::string label;
  for (const auto& id : dest_ids) {
    wanted[registry.require(id)] = 1;
    if (!label.empty()) label += ';';
    label += id;
  }
  DaySeries s;
  s.year = tensor.year();
  s.range = range;
  s.label = "arrivals:" + label;
  s.values.assign(range.length(), 0);
  for (std::uint32_t t = range.start; t < range.end; ++t) {
    std::uint64_t sum = 0;
    for (const auto& c : tensor.day(t)) {
      if (wanted[c.destination]) sum += c.count;
    }
    s.values[t - range.start] = sum;
  }
  return s;
}

std::vector<RankedOrigin> top_k_origins(const OdTensor& tensor, const std::string& dest_id,
                                        DayRange range, std::uint32_t k,
                                        const IcRegistry& registry) {
  check_range(tensor, range);
  check_registry(tensor, registry);
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  const std::uint32_t dest = registry.require(dest_id);
  std::vector<std::uint64_t> by_origin(tensor.n_ics(), 0);
  for (std::uint32_t t = range.start; t < range.end; ++t) {
    for (const auto& c : tensor.day(t)) {
      if (c.destination == dest) by_origin[c.origin] += c.count;
    }
  }
  std::vector<std::uint32_t> order;
  for (std::uint32_t i = 0; i < by_origin.size(); ++i) {
    if (by_origin[i] > 0) order.push_back(i);
  }
  auto before = [&](std::uint32_t a, std::uint32_t b) {
    return by_origin[a] != by_origin[b] ? by_origin[a] > by_origin[b] : a < b;
  };
  const std::size_t keep = std::min<std::size_t>(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(), before);
  std::vector<RankedOrigin> out;
  out.reserve(keep);
  for (std::size_t r = 0; r < keep; ++r) {
    out.push_back({order[r], registry.at(order[r]).ic_id, by_origin[order[r]]});
  }
  return out;
}

std::uint64_t total(const OdTensor& tensor) noexcept { return tensor.total(); }

void write_series_csv(std::ostream& out, const DaySeries& series) {
  out << "day_index,date,count\n";
  for (std::uint32_t k = 0; k < series.values.size(); ++k) {
    const std::uint32_t t = series.range.start + k;
    out << t << ',' << format_date(date_at(series.year, t)) << ',' << series.values[k] << '\n';
  }
}

void write_top_k_csv(std::ostream& out, std::span<const RankedOrigin> ranked) {
  out << "rank,origin_ic,count\n";
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    out << (r + 1) << ',' << ranked[r].ic_id << ',' << ranked[r].count << '\n';
  }
}

void write_matrix_csv(std::ostream& out, const OdMatrix& matrix) {
  out << "i,j,count\n";
  for (std::uint32_t i = 0; i < matrix.n_ics; ++i) {
    for (std::uint32_t j = 0; j < matrix.n_ics; ++j) {
      const auto v = matrix.values[static_cast<std::size_t>(i) * matrix.n_ics + j];
      if (v) out << i << ',' << j << ',' << v << '\n';
    }
  }
}

void write_destination_totals_csv(std::ostream& out, std::span<const std::uint64_t> totals,
                                  const IcRegistry& registry) {
  out << "dest_index,dest_ic,count\n";
  for (std::uint32_t j = 0; j < totals.size(); ++j) {
    out << j << ',' << registry.at(j).ic_id << ',' << totals[j] << '\n';
  }
}

}  // namespace odmap
