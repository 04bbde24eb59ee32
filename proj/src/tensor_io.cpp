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

#include "odmap/tensor_io.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <iterator>

#include "odmap/error.hpp"

namespace odmap {

namespace {

class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}

  template <typename T>
  void put(T value) {
    for (std::size_t k = 0; k < sizeof(T); ++k) {
      out_.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(value) >> (8 * k)));
    }
  }

  template <typename T>
  void put_at(std::size_t pos, T value) {
    for (std::size_t k = 0; k < sizeof(T); ++k) {
      out_[pos + k] = static_cast<std::uint8_t>(static_cast<std::uint64_t>(value) >> (8 * k));
    }
  }

 private:
  std::vector<std::uint8_t>& out_;
};

template <typename T>
T get(std::span<const std::uint8_t> bytes, std::size_t pos) {
  std::uint64_t v = 0;
  for (std::size_t k = 0; k < sizeof(T); ++k) v |= std::uint64_t{bytes[pos + k]} << (8 * k);
  return static_cast<T>(v);
}

std::uint32_t crc_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in bounded pieces.
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const std::size_t n = std::min<std::size_t>(bytes.size() - pos, 1u << 30);
    crc = crc32(crc, bytes.data() + pos, static_cast<uInt>(n));
    pos += n;
  }
  return static_cast<std::uint32_t>(crc);
}

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorCode::Corrupt, what); }

}  // namespace

std::vector<std::uint8_t> serialize(const OdTensor& tensor) {
  const std::uint32_t n_days = tensor.n_days();
  std::vector<std::uint8_t> out;
  out.reserve(kTensorHeaderSize + 8 * n_days + 8 * n_days + 12 * tensor.nnz() + kTensorFooterSize);
  Writer w(out);
  out.insert(out.end(), std::begin(kTensorMagic), std::end(kTensorMagic));
  w.put<std::uint16_t>(kTensorFormatVersion);
  w.put<std::uint16_t>(static_cast<std::uint16_t>(tensor.category()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(tensor.year()));
  w.put<std::uint32_t>(tensor.n_ics());
  w.put<std::uint32_t>(n_days);
  const std::size_t table = out.size();
  out.resize(out.size() + 8 * std::size_t{n_days});
  for (std::uint32_t t = 0; t < n_days; ++t) {
    w.put_at<std::uint64_t>(table + 8 * t, out.size());
    auto slab = tensor.day(t);
    w.put<std::uint64_t>(slab.size());
    for (const auto& c : slab) {
      w.put<std::uint32_t>(c.origin);
      w.put<std::uint32_t>(c.destination);
      w.put<std::uint32_t>(c.count);
    }
  }
  w.put<std::uint64_t>(tensor.total());
  w.put<std::uint32_t>(crc_of(out));
  return out;
}

TensorFileHeader read_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kTensorMagic, 4) != 0) {
    throw Error(ErrorCode::BadMagic, "not an OD3D tensor file");
  }
  if (bytes.size() < 6) throw Error(ErrorCode::Truncated, "file ends inside the header");
  TensorFileHeader h;
  h.version = get<std::uint16_t>(bytes, 4);
  if (h.version != kTensorFormatVersion) {
    throw Error(ErrorCode::VersionMismatch, "unsupported format version " + std::to_string(h.version));
  }
  if (bytes.size() < kTensorHeaderSize) throw Error(ErrorCode::Truncated, "file ends inside the header");
  const auto category = get<std::uint16_t>(bytes, 6);
  h.year = get<std::uint32_t>(bytes, 8);
  h.n_ics = get<std::uint32_t>(bytes, 12);
  h.n_days = get<std::uint32_t>(bytes, 16);
  const std::uint64_t min_size = kTensorHeaderSize + 8ull * h.n_days + 8ull * h.n_days + kTensorFooterSize;
  if (bytes.size() < min_size) {
    throw Error(ErrorCode::Truncated, "file is " + std::to_string(bytes.size()) +
                                          " bytes, structure needs at least " + std::to_string(min_size));
  }
  const std::size_t body = bytes.size() - 4;
  if (crc_of(bytes.first(body)) != get<std::uint32_t>(bytes, body)) {
    throw Error(ErrorCode::ChecksumMismatch, "checksum mismatch");
  }
  if (category > 1) corrupt("invalid category code " + std::to_string(category));
  h.category = static_cast<TimeCategory>(category);
  if (static_cast<int>(h.n_days) != days_in_year(static_cast<int>(h.year))) {
    corrupt("n_days " + std::to_string(h.n_days) + " does not match year " + std::to_string(h.year));
  }
  h.slab_offsets.resize(h.n_days);
  for (std::uint32_t t = 0; t < h.n_days; ++t) {
    h.slab_offsets[t] = get<std::uint64_t>(bytes, kTensorHeaderSize + 8 * std::size_t{t});
    if (t > 0 && h.slab_offsets[t] <= h.slab_offsets[t - 1]) corrupt("slab offsets not increasing");
  }
  return h;
}

OdTensor deserialize(std::span<const std::uint8_t> bytes) {
  const TensorFileHeader h = read_header(bytes);
  const std::size_t footer = bytes.size() - kTensorFooterSize;
  std::size_t pos = kTensorHeaderSize + 8 * std::size_t{h.n_days};
  std::vector<std::vector<CellCount>> slabs(h.n_days);
  std::uint64_t total = 0;
  for (std::uint32_t t = 0; t < h.n_days; ++t) {
    if (h.slab_offsets[t] != pos) corrupt("slab offset mismatch on day " + std::to_string(t));
    if (pos + 8 > footer) corrupt("slab header past end of data");
    const auto nnz = get<std::uint64_t>(bytes, pos);
    pos += 8;
    if (nnz > (footer - pos) / 12) corrupt("slab on day " + std::to_string(t) + " overruns the file");
    auto& slab = slabs[t];
    slab.reserve(nnz);
    for (std::uint64_t k = 0; k < nnz; ++k, pos += 12) {
      CellCount c{get<std::uint32_t>(bytes, pos), get<std::uint32_t>(bytes, pos + 4),
                  get<std::uint32_t>(bytes, pos + 8)};
      slab.push_back(c);
      total += c.count;
    }
  }
  if (pos != footer) corrupt("trailing bytes before footer");
  if (get<std::uint64_t>(bytes, footer) != total) corrupt("footer total does not match cell sum");
  try {
    return OdTensor::from_slabs(static_cast<int>(h.year), h.category, h.n_ics, std::move(slabs));
  } catch (const Error& e) {
    corrupt(e.what());
  }
}

std::uint64_t save(const OdTensor& tensor, const std::string& path) {
  const auto bytes = serialize(tensor);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
  return bytes.size();
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::Io, "read failed for " + path);
  return bytes;
}

OdTensor load(const std::string& path) { return deserialize(read_file_bytes(path)); }

}  // namespace odmap
