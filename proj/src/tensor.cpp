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

#include "odmap/tensor.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <thread>

#include "odmap/error.hpp"

namespace odmap {

namespace {

constexpr std::uint64_t kMaxCount = std::numeric_limits<std::uint32_t>::max();
constexpr std::size_t kCompactThreshold = 1u << 16;

std::uint64_t pack(std::uint32_t i, std::uint32_t j) {
  return (static_cast<std::uint64_t>(i) << 32) | j;
}

[[noreturn]] void throw_overflow(std::uint32_t t, std::uint64_t key) {
  throw Error(ErrorCode::Overflow, "cell (" + std::to_string(key >> 32) + ", " +
                                       std::to_string(key & 0xffffffffu) + ", " +
                                       std::to_string(t) + ") exceeds 32-bit count");
}

}  // namespace

OdTensor::OdTensor(int year, TimeCategory category, std::uint32_t n_ics)
    : year_(year),
      category_(category),
      n_ics_(n_ics),
      slabs_(static_cast<std::size_t>(days_in_year(year))) {}

OdTensor::OdTensor(int year, TimeCategory category, std::uint32_t n_ics,
                   std::vector<std::vector<CellCount>> slabs, std::uint64_t total)
    : year_(year), category_(category), n_ics_(n_ics), slabs_(std::move(slabs)), total_(total) {}

OdTensor OdTensor::from_slabs(int year, TimeCategory category, std::uint32_t n_ics,
                              std::vector<std::vector<CellCount>> slabs) {
  if (slabs.size() != static_cast<std::size_t>(days_in_year(year))) {
    throw Error(ErrorCode::InvalidArgument,
                "expected " + std::to_string(days_in_year(year)) + " day slabs for year " +
                    std::to_string(year) + ", got " + std::to_string(slabs.size()));
  }
  std::uint64_t total = 0;
  for (std::size_t t = 0; t < slabs.size(); ++t) {
    const auto& slab = slabs[t];
    for (std::size_t k = 0; k < slab.size(); ++k) {
      const auto& c = slab[k];
      if (c.origin >= n_ics || c.destination >= n_ics) {
        throw Error(ErrorCode::InvalidArgument, "cell index out of range on day " + std::to_string(t));
      }
      if (c.count == 0) {
        throw Error(ErrorCode::InvalidArgument, "zero count stored on day " + std::to_string(t));
      }
      if (k > 0 && pack(slab[k - 1].origin, slab[k - 1].destination) >= pack(c.origin, c.destination)) {
        throw Error(ErrorCode::InvalidArgument, "slab not strictly sorted on day " + std::to_string(t));
      }
      total += c.count;
    }
  }
  return OdTensor(year, category, n_ics, std::move(slabs), total);
}

std::uint32_t OdTensor::at(std::uint32_t origin, std::uint32_t destination, std::uint32_t t) const {
  const auto& slab = slabs_.at(t);
  const std::uint64_t key = pack(origin, destination);
  auto it = std::lower_bound(slab.begin(), slab.end(), key, [](const CellCount& c, std::uint64_t k) {
    return pack(c.origin, c.destination) < k;
  });
  if (it != slab.end() && it->origin == origin && it->destination == destination) return it->count;
  return 0;
}

std::uint64_t OdTensor::nnz() const noexcept {
  std::uint64_t n = 0;
  for (const auto& slab : slabs_) n += slab.size();
  return n;
}

std::vector<std::uint32_t> OdTensor::dense_day(std::uint32_t t) const {
  std::vector<std::uint32_t> dense(static_cast<std::size_t>(n_ics_) * n_ics_, 0);
  for (const auto& c : slabs_.at(t)) dense[static_cast<std::size_t>(c.origin) * n_ics_ + c.destination] = c.count;
  return dense;
}

OdTensor merge(const OdTensor& a, const OdTensor& b) {
  if (a.year() != b.year() || a.category() != b.category() || a.n_ics() != b.n_ics() ||
      a.n_days() != b.n_days()) {
    throw Error(ErrorCode::Mismatch, "cannot merge tensors with different year, category or shape");
  }
  std::vector<std::vector<CellCount>> slabs(a.n_days());
  for (std::uint32_t t = 0; t < a.n_days(); ++t) {
    auto da = a.day(t);
    auto db = b.day(t);
    auto& out = slabs[t];
    out.reserve(da.size() + db.size());
    std::size_t x = 0, y = 0;
    while (x < da.size() || y < db.size()) {
      if (y == db.size() || (x < da.size() && pack(da[x].origin, da[x].destination) <
                                                  pack(db[y].origin, db[y].destination))) {
        out.push_back(da[x++]);
      } else if (x == da.size() || pack(db[y].origin, db[y].destination) <
                                       pack(da[x].origin, da[x].destination)) {
        out.push_back(db[y++]);
      } else {
        const std::uint64_t sum = std::uint64_t{da[x].count} + db[y].count;
        if (sum > kMaxCount) throw_overflow(t, pack(da[x].origin, da[x].destination));
        out.push_back({da[x].origin, da[x].destination, static_cast<std::uint32_t>(sum)});
        ++x;
        ++y;
      }
    }
  }
  return OdTensor::from_slabs(a.year(), a.category(), a.n_ics(), std::move(slabs));
}

IngestStats& IngestStats::operator+=(const IngestStats& o) noexcept {
  read += o.read;
  accepted += o.accepted;
  other_category += o.other_category;
  out_of_year += o.out_of_year;
  unknown_ic += o.unknown_ic;
  malformed += o.malformed;
  return *this;
}

DualIngestStats& DualIngestStats::operator+=(const DualIngestStats& o) noexcept {
  read += o.read;
  accepted_unspecified += o.accepted_unspecified;
  accepted_specified += o.accepted_specified;
  out_of_year += o.out_of_year;
  unknown_ic += o.unknown_ic;
  malformed += o.malformed;
  return *this;
}

SlabAccumulator::SlabAccumulator(std::uint32_t n_days, std::uint32_t n_ics)
    : n_ics_(n_ics), pending_(n_days), compacted_(n_days) {}

void SlabAccumulator::add(std::uint32_t t, std::uint32_t origin, std::uint32_t destination) {
  auto& pending = pending_[t];
  pending.push_back(pack(origin, destination));
  if (pending.size() >= kCompactThreshold) compact(t);
}

void SlabAccumulator::compact(std::uint32_t t) {
  auto& pending = pending_[t];
  if (pending.empty()) return;
  std::sort(pending.begin(), pending.end());
  std::vector<std::pair<std::uint64_t, std::uint64_t>> runs;
  for (std::size_t k = 0; k < pending.size();) {
    std::size_t e = k;
    while (e < pending.size() && pending[e] == pending[k]) ++e;
    runs.emplace_back(pending[k], e - k);
    k = e;
  }
  pending.clear();
  pending.shrink_to_fit();
  auto& old = compacted_[t];
  std::vector<std::pair<std::uint64_t, std::uint64_t>> merged;
  merged.reserve(old.size() + runs.size());
  std::size_t x = 0, y = 0;
  while (x < old.size() || y < runs.size()) {
    if (y == runs.size() || (x < old.size() && old[x].first < runs[y].first)) {
      merged.push_back(old[x++]);
    } else if (x == old.size() || runs[y].first < old[x].first) {
      merged.push_back(runs[y++]);
    } else {
      merged.emplace_back(old[x].first, old[x].second + runs[y].second);
      ++x;
      ++y;
    }
  }
  old = std::move(merged);
}

std::vector<std::vector<CellCount>> SlabAccumulator::finish() {
  std::vector<std::vector<CellCount>> slabs(compacted_.size());
  for (std::uint32_t t = 0; t < compacted_.size(); ++t) {
    compact(t);
    auto& slab = slabs[t];
    slab.reserve(compacted_[t].size());
    for (const auto& [key, count] : compacted_[t]) {
      if (count > kMaxCount) throw_overflow(t, key);
      slab.push_back({static_cast<std::uint32_t>(key >> 32),
                      static_cast<std::uint32_t>(key & 0xffffffffu),
                      static_cast<std::uint32_t>(count)});
    }
    compacted_[t].clear();
  }
  return slabs;
}

OdTensorBuilder::OdTensorBuilder(const IcRegistry& registry, int year, TimeCategory category,
                                 UnknownIcPolicy policy)
    : registry_(&registry),
      year_(year),
      category_(category),
      policy_(policy),
      acc_(static_cast<std::uint32_t>(days_in_year(year)),
           static_cast<std::uint32_t>(registry.size())) {}

void OdTensorBuilder::add(const SearchRecord& record) {
  ++stats_.read;
  const TimeCategory cat = classify(record);
  if (cat != category_) {
    ++stats_.other_category;
    return;
  }
  auto t = day_index(effective_timestamp(record, cat), year_);
  if (!t) {
    ++stats_.out_of_year;
    return;
  }
  auto i = registry_->index_of(record.departure_ic);
  auto j = registry_->index_of(record.arrival_ic);
  if (!i || !j) {
    ++stats_.unknown_ic;
    if (first_unknown_.empty()) first_unknown_ = !i ? record.departure_ic : record.arrival_ic;
    return;
  }
  acc_.add(*t, *i, *j);
  ++stats_.accepted;
}

namespace {

[[noreturn]] void throw_unknown(std::uint64_t count, const std::string& first) {
  throw Error(ErrorCode::UnknownIc, std::to_string(count) +
                                        " record(s) reference interchanges missing from the "
                                        "registry (first: " + first + ")");
}

}  // namespace

OdTensor OdTensorBuilder::finish() {
  if (policy_ == UnknownIcPolicy::Error && stats_.unknown_ic > 0) {
    throw_unknown(stats_.unknown_ic, first_unknown_);
  }
  return OdTensor::from_slabs(year_, category_, static_cast<std::uint32_t>(registry_->size()),
                              acc_.finish());
}

OdTensor build_od_tensor(std::span<const SearchRecord> records, const IcRegistry& registry,
                         int year, TimeCategory category, UnknownIcPolicy policy,
                         IngestStats* stats) {
  OdTensorBuilder builder(registry, year, category, policy);
  for (const auto& r : records) builder.add(r);
  if (stats) *stats = builder.stats();
  return builder.finish();
}

DualTensorBuilder::DualTensorBuilder(const IcRegistry& registry, int year, UnknownIcPolicy policy)
    : registry_(&registry),
      year_(year),
      policy_(policy),
      unspecified_(static_cast<std::uint32_t>(days_in_year(year)),
                   static_cast<std::uint32_t>(registry.size())),
      specified_(static_cast<std::uint32_t>(days_in_year(year)),
                 static_cast<std::uint32_t>(registry.size())) {}

void DualTensorBuilder::add(const SearchRecord& record) {
  ++stats_.read;
  const TimeCategory cat = classify(record);
  auto t = day_index(effective_timestamp(record, cat), year_);
  if (!t) {
    ++stats_.out_of_year;
    return;
  }
  auto i = registry_->index_of(record.departure_ic);
  auto j = registry_->index_of(record.arrival_ic);
  if (!i || !j) {
    ++stats_.unknown_ic;
    if (first_unknown_.empty()) first_unknown_ = !i ? record.departure_ic : record.arrival_ic;
    return;
  }
  if (cat == TimeCategory::Specified) {
    specified_.add(*t, *i, *j);
    ++stats_.accepted_specified;
  } else {
    unspecified_.add(*t, *i, *j);
    ++stats_.accepted_unspecified;
  }
}

DualBuildResult DualTensorBuilder::finish() {
  if (policy_ == UnknownIcPolicy::Error && stats_.unknown_ic > 0) {
    throw_unknown(stats_.unknown_ic, first_unknown_);
  }
  const auto n = static_cast<std::uint32_t>(registry_->size());
  return DualBuildResult{
      OdTensor::from_slabs(year_, TimeCategory::Unspecified, n, unspecified_.finish()),
      OdTensor::from_slabs(year_, TimeCategory::Specified, n, specified_.finish()), stats_};
}

namespace {

constexpr std::size_t kChunkLines = 1u << 16;

struct Worker {
  DualTensorBuilder builder;
  std::size_t error_line = 0;
  std::string error_reason;
};

void process_lines(Worker& w, const std::vector<std::string>& lines, std::size_t begin,
                   std::size_t end, std::size_t first_line_number, const IngestOptions& options) {
  for (std::size_t k = begin; k < end; ++k) {
    const std::string& line = lines[k];
    if (line.empty() || line == "\r") continue;
    try {
      w.builder.add(parse_record(line, options.format, first_line_number + k));
    } catch (const ParseError& e) {
      if (!options.skip_malformed) {
        if (w.error_line == 0 || e.line() < w.error_line) {
          w.error_line = e.line();
          w.error_reason = e.reason();
        }
        return;
      }
      w.builder.note_malformed();
    }
  }
}

}  // namespace

DualBuildResult ingest_log_csv(std::istream& in, const IcRegistry& registry,
                               const IngestOptions& options) {
  const unsigned n_workers = std::max(1u, options.threads);
  std::vector<Worker> workers;
  workers.reserve(n_workers);
  for (unsigned w = 0; w < n_workers; ++w) {
    workers.push_back(Worker{DualTensorBuilder(registry, options.year, UnknownIcPolicy::Skip), 0, {}});
  }

  std::vector<std::string> lines;
  lines.reserve(kChunkLines);
  std::size_t line_number = 0;
  std::string line;
  bool header_pending = options.has_header;
  bool eof = false;
  while (!eof) {
    lines.clear();
    const std::size_t chunk_first = line_number + 1;
    while (lines.size() < kChunkLines) {
      if (!std::getline(in, line)) {
        eof = true;
        break;
      }
      ++line_number;
      if (header_pending) {
        header_pending = false;
        lines.emplace_back();
        continue;
      }
      lines.push_back(std::move(line));
    }
    if (lines.empty()) break;

    const std::size_t per = (lines.size() + n_workers - 1) / n_workers;
    if (n_workers == 1) {
      process_lines(workers[0], lines, 0, lines.size(), chunk_first, options);
    } else {
      std::vector<std::thread> threads;
      for (unsigned w = 0; w < n_workers; ++w) {
        const std::size_t b = std::min(lines.size(), w * per);
        const std::size_t e = std::min(lines.size(), b + per);
        threads.emplace_back(process_lines, std::ref(workers[w]), std::cref(lines), b, e,
                             chunk_first, std::cref(options));
      }
      for (auto& th : threads) th.join();
    }
    std::size_t err_line = 0;
    std::string err_reason;
    for (const auto& w : workers) {
      if (w.error_line != 0 && (err_line == 0 || w.error_line < err_line)) {
        err_line = w.error_line;
        err_reason = w.error_reason;
      }
    }
    if (err_line != 0) throw ParseError(err_line, err_reason);
  }
  if (in.bad()) throw Error(ErrorCode::Io, "error reading log input");

  DualIngestStats stats;
  std::string first_unknown;
  for (const auto& w : workers) {
    stats += w.builder.stats();
    if (first_unknown.empty()) first_unknown = w.builder.first_unknown();
  }
  if (options.unknown_ic == UnknownIcPolicy::Error && stats.unknown_ic > 0) {
    throw_unknown(stats.unknown_ic, first_unknown);
  }
  DualBuildResult result = workers[0].builder.finish();
  for (unsigned w = 1; w < n_workers; ++w) {
    DualBuildResult part = workers[w].builder.finish();
    result.unspecified = merge(result.unspecified, part.unspecified);
    result.specified = merge(result.specified, part.specified);
  }
  result.stats = stats;
  return result;
}

DualBuildResult ingest_log_file(const std::string& path, const IcRegistry& registry,
                                const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open log file " + path);
  return ingest_log_csv(in, registry, options);
}

}  // namespace odmap
