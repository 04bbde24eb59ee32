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
#include <span>
#include <string>
#include <vector>

#include "odmap/tensor.hpp"

namespace odmap {

// On-disk tensor layout, all integers little-endian:
//
//   "OD3D" | u16 version | u16 category | u32 year | u32 n_ics | u32 n_days
//   u64 slab offset (absolute, from file start) x n_days
//   per day: u64 nnz, then nnz x (u32 origin, u32 destination, u32 count)
//            sorted by (origin, destination)
//   u64 total count | u32 CRC-32 of every preceding byte

inline constexpr char kTensorMagic[4] = {'O', 'D', '3', 'D'};
inline constexpr std::uint16_t kTensorFormatVersion = 1;
inline constexpr std::size_t kTensorHeaderSize = 20;
inline constexpr std::size_t kTensorFooterSize = 12;

struct TensorFileHeader {
  std::uint16_t version = kTensorFormatVersion;
  TimeCategory category = TimeCategory::Unspecified;
  std::uint32_t year = 0;
  std::uint32_t n_ics = 0;
  std::uint32_t n_days = 0;
  std::vector<std::uint64_t> slab_offsets;
};

std::vector<std::uint8_t> serialize(const OdTensor& tensor);

/// Errors, checked in this order: BadMagic, VersionMismatch, Truncated (too
/// short for header, offset table and footer), ChecksumMismatch, Corrupt.
OdTensor deserialize(std::span<const std::uint8_t> bytes);

/// Header fields of a serialized tensor, validated like deserialize.
TensorFileHeader read_header(std::span<const std::uint8_t> bytes);

/// Returns the number of bytes written.
std::uint64_t save(const OdTensor& tensor, const std::string& path);
OdTensor load(const std::string& path);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);

}  // namespace odmap
