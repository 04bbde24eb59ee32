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

#include "odmap/model.hpp"

namespace odmap {

/// One nonzero cell of a day slab.
struct CellCount {
  std::uint32_t origin = 0;
  std::uint32_t destination = 0;
  std::uint32_t count = 0;

  bool operator==(const CellCount&) const = default;
};

/// Per-year, per-category Origin x Destination x Day count tensor.
///
/// Stored as one sparse slab per day, each sorted by (origin, destination)
/// with strictly positive counts. Immutable once built.
class OdTensor {
 public:
  /// All-zero tensor.
  OdTensor(int year, TimeCategory category, std::uint32_t n_ics);

  /// Validates slab shape: one slab per day, sorted unique coordinates in
  /// range, positive counts. Throws Error(InvalidArgument) otherwise.
  static OdTensor from_slabs(int year, TimeCategory category, std::uint32_t n_ics,
                             std::vector<std::vector<CellCount>> slabs);

  int year() const noexcept { return year_; }
  TimeCategory category() const noexcept { return category_; }
  std::uint32_t n_ics() const noexcept { return n_ics_; }
  std::uint32_t n_days() const noexcept { return static_cast<std::uint32_t>(slabs_.size()); }

  std::span<const CellCount> day(std::uint32_t t) const { return slabs_.at(t); }
  std::uint32_t at(std::uint32_t origin, std::uint32_t destination, std::uint32_t t) const;

  std::uint64_t total() const noexcept { return total_; }
  std::uint64_t nnz() const noexcept;

  /// Dense row-major n_ics x n_ics matrix of one day.
  std::vector<std::uint32_t> dense_day(std::uint32_t t) const;

  bool operator==(const OdTensor& other) const = default;

 private:
  OdTensor(int year, TimeCategory category, std::uint32_t n_ics,
           std::vector<std::vector<CellCount>> slabs, std::uint64_t total);

  int year_;
  TimeCategory category_;
  std::uint32_t n_ics_;
  std::vector<std::vector<CellCount>> slabs_;
  std::uint64_t total_ = 0;
};

/// Elementwise sum. Throws Error(Mismatch) when year, category or shape
/// differ and Error(Overflow) when a cell exceeds 32 bits.
OdTensor merge(const OdTensor& a, const OdTensor& b);

enum class UnknownIcPolicy { Error, Skip };

/// Per-tensor accounting:
///   read == accepted + other_category + out_of_year + unknown_ic + malformed
struct IngestStats {
  std::uint64_t read = 0;
  std::uint64_t accepted = 0;
  std::uint64_t other_category = 0;
  std::uint64_t out_of_year = 0;
  std::uint64_t unknown_ic = 0;
  std::uint64_t malformed = 0;

  bool reconciles() const noexcept {
    return read == accepted + other_category + out_of_year + unknown_ic + malformed;
  }
  IngestStats& operator+=(const IngestStats& o) noexcept;
  bool operator==(const IngestStats&) const = default;
};

/// Accumulates (day, origin, destination) increments and compacts them into
/// sorted slabs. Memory stays proportional to the number of distinct cells.
class SlabAccumulator {
 public:
  SlabAccumulator(std::uint32_t n_days, std::uint32_t n_ics);

  void add(std::uint32_t t, std::uint32_t origin, std::uint32_t destination);
  /// Throws Error(Overflow) if a cell count exceeds 32 bits.
  std::vector<std::vector<CellCount>> finish();

 private:
  void compact(std::uint32_t t);

  std::uint32_t n_ics_;
  std::vector<std::vector<std::uint64_t>> pending_;
  std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> compacted_;
};

/// Streaming builder for a single (year, category) tensor.
class OdTensorBuilder {
 public:
  OdTensorBuilder(const IcRegistry& registry, int year, TimeCategory category,
                  UnknownIcPolicy policy = UnknownIcPolicy::Error);

  void add(const SearchRecord& record);
  /// Records a line that failed to parse and was skipped by the caller.
  void note_malformed() noexcept { ++stats_.read; ++stats_.malformed; }

  const IngestStats& stats() const noexcept { return stats_; }

  /// Throws Error(UnknownIc) with the unknown-record count when the policy is
  /// Error and any record referenced an IC outside the registry.
  OdTensor finish();

 private:
  const IcRegistry* registry_;
  int year_;
  TimeCategory category_;
  UnknownIcPolicy policy_;
  SlabAccumulator acc_;
  IngestStats stats_;
  std::string first_unknown_;
};

OdTensor build_od_tensor(std::span<const SearchRecord> records, const IcRegistry& registry,
                         int year, TimeCategory category,
                         UnknownIcPolicy policy = UnknownIcPolicy::Error,
                         IngestStats* stats = nullptr);

/// Accounting for a single pass that fills both category tensors:
///   read == accepted[0] + accepted[1] + out_of_year + unknown_ic + malformed
struct DualIngestStats {
  std::uint64_t read = 0;
  std::uint64_t accepted_unspecified = 0;
  std::uint64_t accepted_specified = 0;
  std::uint64_t out_of_year = 0;
  std::uint64_t unknown_ic = 0;
  std::uint64_t malformed = 0;

  bool reconciles() const noexcept {
    return read == accepted_unspecified + accepted_specified + out_of_year + unknown_ic + malformed;
  }
  DualIngestStats& operator+=(const DualIngestStats& o) noexcept;
  bool operator==(const DualIngestStats&) const = default;
};

struct DualBuildResult {
  OdTensor unspecified;
  OdTensor specified;
  DualIngestStats stats;
};

/// Builds both category tensors for one year in one pass.
class DualTensorBuilder {
 public:
  DualTensorBuilder(const IcRegistry& registry, int year,
                    UnknownIcPolicy policy = UnknownIcPolicy::Error);

  void add(const SearchRecord& record);
  void note_malformed() noexcept { ++stats_.read; ++stats_.malformed; }
  const DualIngestStats& stats() const noexcept { return stats_; }
  const std::string& first_unknown() const noexcept { return first_unknown_; }
  DualBuildResult finish();

 private:
  const IcRegistry* registry_;
  int year_;
  UnknownIcPolicy policy_;
  SlabAccumulator unspecified_;
  SlabAccumulator specified_;
  DualIngestStats stats_;
  std::string first_unknown_;
};

struct IngestOptions {
  int year = 0;
  bool has_header = false;
  bool skip_malformed = false;
  UnknownIcPolicy unknown_ic = UnknownIcPolicy::Error;
  /// Parsing/counting workers; the result is identical for any value.
  unsigned threads = 1;
  RecordFormat format;
};

/// Reads a log CSV and builds both category tensors. Malformed rows abort
/// with ParseError unless skip_malformed is set.
DualBuildResult ingest_log_csv(std::istream& in, const IcRegistry& registry,
                               const IngestOptions& options);
DualBuildResult ingest_log_file(const std::string& path, const IcRegistry& registry,
                                const IngestOptions& options);

}  // namespace odmap
