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

#include <filesystem>
#include <string>
#include <unistd.h>

#include "odmap/tensor.hpp"
#include "oracles.hpp"

namespace testing {

inline odmap::OdTensor to_tensor(const oracle::Cube& cube, int year,
                                 odmap::TimeCategory category = odmap::TimeCategory::Specified) {
  std::vector<std::vector<odmap::CellCount>> slabs(static_cast<std::size_t>(odmap::days_in_year(year)));
  for (std::uint32_t i = 0; i < cube.n; ++i) {
    for (std::uint32_t j = 0; j < cube.n; ++j) {
      for (std::uint32_t t = 0; t < cube.days; ++t) {
        if (cube.at(i, j, t)) slabs[t].push_back({i, j, cube.at(i, j, t)});
      }
    }
  }
  return odmap::OdTensor::from_slabs(year, category, cube.n, std::move(slabs));
}

/// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("odmap_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string data_file(const std::string& name) {
  return std::string(ODMAP_TEST_DATA) + "/" + name;
}

}  // namespace testing
