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

#include <cstring>
#include <random>

#include "doctest.h"
#include "odmap/error.hpp"
#include "odmap/tensor_io.hpp"
#include "support.hpp"

using namespace odmap;

namespace {

// Bitwise reflected CRC-32 (poly 0xEDB88320), independent of zlib.
std::uint32_t crc32_reference(const std::uint8_t* p, std::size_t n) {
  std::uint32_t crc = 0xffffffffu;
  for (std::size_t k = 0; k < n; ++k) {
    crc ^= p[k];
    for (int b = 0; b < 8; ++b) crc = (crc >> 1) ^ (0xedb88320u & (0u - (crc & 1u)));
  }
  return ~crc;
}

std::uint64_t le(const std::vector<std::uint8_t>& b, std::size_t pos, std::size_t width) {
  std::uint64_t v = 0;
  for (std::size_t k = 0; k < width; ++k) v |= std::uint64_t{b[pos + k]} << (8 * k);
  return v;
}

ErrorCode load_error(std::span<const std::uint8_t> bytes) {
  try {
    deserialize(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

}  // namespace

TEST_CASE("byte layout of a tiny tensor") {
  std::vector<std::vector<CellCount>> slabs(365);
  slabs[0] = {{0, 1, 5}};
  slabs[2] = {{1, 0, 2}, {1, 1, 3}};
  const auto t = OdTensor::from_slabs(2023, TimeCategory::Specified, 2, slabs);
  const auto b = serialize(t);

  const std::size_t table = 20;
  const std::size_t first_slab = table + 8 * 365;
  CHECK(std::memcmp(b.data(), "OD3D", 4) == 0);
  CHECK(le(b, 4, 2) == 1);
  CHECK(le(b, 6, 2) == 1);
  CHECK(le(b, 8, 4) == 2023);
  CHECK(le(b, 12, 4) == 2);
  CHECK(le(b, 16, 4) == 365);
  CHECK(le(b, table, 8) == first_slab);
  CHECK(le(b, first_slab, 8) == 1);
  CHECK(le(b, first_slab + 8, 4) == 0);
  CHECK(le(b, first_slab + 12, 4) == 1);
  CHECK(le(b, first_slab + 16, 4) == 5);
  const std::size_t day1 = first_slab + 8 + 12;
  CHECK(le(b, table + 8, 8) == day1);
  CHECK(le(b, day1, 8) == 0);
  const std::size_t day2 = day1 + 8;
  CHECK(le(b, table + 16, 8) == day2);
  CHECK(le(b, day2, 8) == 2);
  CHECK(le(b, day2 + 8, 4) == 1);
  CHECK(le(b, day2 + 12, 4) == 0);
  CHECK(le(b, day2 + 16, 4) == 2);
  CHECK(le(b, day2 + 20, 4) == 1);
  CHECK(le(b, day2 + 24, 4) == 1);
  CHECK(le(b, day2 + 28, 4) == 3);
  const std::size_t expected_size = 20 + 8 * 365 + 8 * 365 + 3 * 12 + 12;
  REQUIRE(b.size() == expected_size);
  CHECK(le(b, b.size() - 12, 8) == 10);
  CHECK(le(b, b.size() - 4, 4) == crc32_reference(b.data(), b.size() - 4));

  const auto h = read_header(b);
  CHECK(h.slab_offsets.size() == 365);
  CHECK(h.slab_offsets[2] == day2);
  CHECK(deserialize(b) == t);
}

TEST_CASE("zero tensor round-trips and is tiny relative to dense storage") {
  testing::TempDir dir("io_zero");
  const OdTensor zero(2024, TimeCategory::Unspecified, 200);
  const auto path = dir.file("zero.od3d");
  const auto bytes = save(zero, path);
  const double dense = 200.0 * 200.0 * 366.0 * 4.0;
  CHECK(static_cast<double>(bytes) < 0.01 * dense);
  CHECK(load(path) == zero);
}

TEST_CASE("random sparse tensors round-trip bit-exactly") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 5; ++trial) {
    const auto cube = oracle::random_cube(rng, 40, 365, 0.001, 1000000);
    const auto t = testing::to_tensor(cube, 2023, trial % 2 ? TimeCategory::Specified : TimeCategory::Unspecified);
    const auto b = serialize(t);
    const auto back = deserialize(b);
    CHECK(back == t);
    for (std::uint32_t i = 0; i < 40; ++i) {
      for (std::uint32_t j = 0; j < 40; ++j) {
        for (std::uint32_t d = 0; d < 365; d += 7) CHECK(back.at(i, j, d) == cube.at(i, j, d));
      }
    }
    CHECK(serialize(back) == b);
  }
}

TEST_CASE("distinguishable load failures") {
  std::mt19937_64 rng(5);
  const auto t = testing::to_tensor(oracle::random_cube(rng, 10, 365, 0.01), 2023);
  const auto good = serialize(t);

  auto bad_magic = good;
  bad_magic[0] = 'X';
  CHECK(load_error(bad_magic) == ErrorCode::BadMagic);

  auto bad_version = good;
  bad_version[4] = 2;
  CHECK(load_error(bad_version) == ErrorCode::VersionMismatch);

  CHECK(load_error(std::span(good).first(3)) == ErrorCode::BadMagic);
  CHECK(load_error(std::span(good).first(12)) == ErrorCode::Truncated);
  CHECK(load_error(std::span(good).first(20 + 8 * 365)) == ErrorCode::Truncated);

  auto payload = good;
  payload[good.size() / 2] ^= 0x40;
  CHECK(load_error(payload) == ErrorCode::ChecksumMismatch);

  auto footer = good;
  footer[good.size() - 1] ^= 0x01;
  CHECK(load_error(footer) == ErrorCode::ChecksumMismatch);

  CHECK(load_error(good) == ErrorCode{});
}

TEST_CASE("structurally invalid but checksummed files are reported corrupt") {
  std::vector<std::vector<CellCount>> slabs(365);
  slabs[5] = {{0, 1, 2}};
  auto b = serialize(OdTensor::from_slabs(2023, TimeCategory::Specified, 2, slabs));
  // Rewrite the footer total and recompute the checksum.
  b[b.size() - 12] = 9;
  const auto crc = crc32_reference(b.data(), b.size() - 4);
  for (int k = 0; k < 4; ++k) b[b.size() - 4 + k] = static_cast<std::uint8_t>(crc >> (8 * k));
  CHECK(load_error(b) == ErrorCode::Corrupt);
}

TEST_CASE("missing file is an I/O error") {
  CHECK_THROWS_AS(load("/nonexistent/dir/x.od3d"), Error);
}
