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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "odmap/error.hpp"
#include "odmap/synth.hpp"
#include "odmap/tensor.hpp"
#include "support.hpp"

using namespace odmap;

namespace {

GeneratorConfig small_config() {
  GeneratorConfig c;
  c.seed = 99;
  c.years = {2023};
  c.n_ics = 5;
  c.base_rate = 20.0;
  c.specified_fraction = 1.0;
  return c;
}

}  // namespace

TEST_CASE("zero base rate yields no records") {
  auto c = small_config();
  c.base_rate = 0.0;
  c.hotspots = {{"h", 1, {4, 1}, {4, 30}, 10.0, 1.5, std::nullopt}};
  std::ostringstream out;
  const auto r = generate_csv(c, make_registry(5, 1), out);
  CHECK(r.records == 0);
  CHECK(out.str().empty());
}

TEST_CASE("same seed gives byte-identical output") {
  auto c = small_config();
  c.base_rate = 0.5;
  c.specified_fraction = 0.4;
  c.years = {2023, 2024};
  c.popularity_exponent = 1.0;
  const auto reg = make_registry(5, 7);
  std::ostringstream a, b, other;
  generate_csv(c, reg, a);
  generate_csv(c, reg, b);
  CHECK(a.str() == b.str());
  CHECK(!a.str().empty());
  c.seed += 1;
  generate_csv(c, reg, other);
  CHECK(a.str() != other.str());
}

TEST_CASE("flat hotspot multiplies in-season arrivals") {
  auto c = small_config();
  c.hotspots = {{"h", 2, {4, 1}, {4, 30}, 10.0, 1.0, std::nullopt}};
  const auto reg = make_registry(5, 3);
  const auto dest = reg.at(2).ic_id;
  std::uint64_t in = 0, off = 0;
  const DayRange season{90, 120};
  generate(c, reg, [&](const SearchRecord& r) {
    if (r.arrival_ic != dest) return;
    const auto t = *day_index(effective_timestamp(r, classify(r)), 2023);
    (t >= season.start && t < season.end ? in : off) += 1;
  });
  const double in_days = season.length();
  const double off_days = 365 - in_days;
  const double ratio = (in / in_days) / (off / off_days);
  const double se = ratio * std::sqrt(1.0 / static_cast<double>(in) + 1.0 / static_cast<double>(off));
  CHECK(std::abs(ratio - 10.0) < 3.0 * se);
}

TEST_CASE("ground truth follows the configured factors") {
  auto c = small_config();
  c.years = {2023, 2024};
  c.yearly_growth = 1.2;
  c.hotspots = {{"tri", 1, {5, 1}, {5, 21}, 10.0, 2.0, MonthDay{5, 11}}};
  const auto reg = make_registry(5, 3);
  const auto r = generate(c, reg, [](const SearchRecord&) {});
  const auto& g = r.truth;
  CHECK(g.intensity(0, 0, 10) == doctest::Approx(20.0));
  CHECK(g.intensity(1, 0, 10) == doctest::Approx(24.0));
  // 2023-05-11 is a Thursday and the peak day.
  const auto peak = *day_index(Date{2023, 5, 11}, 2023);
  CHECK(g.intensity(0, 1, peak) == doctest::Approx(200.0));
  CHECK(g.intensity(0, 1, peak - 30) == doctest::Approx(20.0));
  // 2023-05-13 is a Saturday.
  const auto sat = *day_index(Date{2023, 5, 13}, 2023);
  CHECK(g.intensity(0, 1, sat) > g.intensity(0, 1, peak));
  REQUIRE(g.peaks.size() == 2);
  CHECK(g.peaks[0].label == "tri");
  CHECK(g.peaks[0].year == 2023);
  CHECK(g.peaks[0].intensity == doctest::Approx(g.intensity(0, 1, g.peaks[0].day_index)));
  CHECK(g.cell_intensity(0, 3, 0, 10) == doctest::Approx(g.popularity[3] * 20.0));
  double mean = 0;
  for (double w : g.popularity) mean += w;
  CHECK(mean / 5 == doctest::Approx(1.0));
}

TEST_CASE("popularity exponent skews origins") {
  auto c = small_config();
  c.n_ics = 20;
  c.base_rate = 0.5;
  c.popularity_exponent = 1.5;
  const auto reg = make_registry(20, 5);
  const auto r = generate(c, reg, [](const SearchRecord&) {});
  const auto [lo, hi] = std::minmax_element(r.truth.popularity.begin(), r.truth.popularity.end());
  CHECK(*hi / *lo > 50.0);
}

TEST_CASE("record timestamps respect the category rules") {
  auto c = small_config();
  c.base_rate = 2.0;
  c.specified_fraction = 0.3;
  c.lookahead_days = 10;
  const auto reg = make_registry(5, 1);
  std::uint64_t spec = 0, total = 0, past = 0;
  generate(c, reg, [&](const SearchRecord& r) {
    ++total;
    CHECK(day_index(effective_timestamp(r, classify(r)), 2023).has_value());
    if (classify(r) == TimeCategory::Specified) {
      ++spec;
      const auto gap = to_minutes(*r.specified_time) - to_minutes(r.search_time);
      CHECK(gap > 0);
      CHECK(gap <= 10 * 1440);
    } else if (r.specified_time) {
      ++past;
      CHECK(*r.specified_time <= r.search_time);
    }
  });
  REQUIRE(total > 10000);
  CHECK(static_cast<double>(spec) / total == doctest::Approx(0.3).epsilon(0.05));
  CHECK(past > 0);
}

TEST_CASE("make_registry") {
  const auto one = make_registry(1, 1);
  CHECK(one.size() == 1);
  CHECK(one.at(0).ic_id == "IC0000");
  const auto big = make_registry(2728, 11);
  CHECK(big.size() == 2728);
  for (std::uint32_t k = 0; k < big.size(); ++k) {
    const auto& e = big.at(k);
    CHECK(e.longitude >= 129.5);
    CHECK(e.longitude <= 145.5);
    CHECK(e.latitude >= 31.0);
    CHECK(e.latitude <= 45.5);
  }
  CHECK(big.index_of("IC2727").has_value());
  const auto again = make_registry(2728, 11);
  for (std::uint32_t k = 0; k < big.size(); ++k) CHECK(again.at(k).ic_id == big.at(k).ic_id);
  CHECK_THROWS_AS(make_registry(0, 1), Error);
}

TEST_CASE("configuration validation") {
  auto check_bad = [](auto mutate) {
    auto c = small_config();
    mutate(c);
    CHECK_THROWS_AS(c.validate(), Error);
  };
  check_bad([](GeneratorConfig& c) { c.n_ics = 0; });
  check_bad([](GeneratorConfig& c) { c.years.clear(); });
  check_bad([](GeneratorConfig& c) { c.base_rate = -1; });
  check_bad([](GeneratorConfig& c) { c.specified_fraction = 1.5; });
  check_bad([](GeneratorConfig& c) { c.yearly_growth = 0; });
  check_bad([](GeneratorConfig& c) { c.lookahead_days = 0; });
  check_bad([](GeneratorConfig& c) { c.popularity_exponent = -0.5; });
  check_bad([](GeneratorConfig& c) { c.hotspots = {{"h", 9, {4, 1}, {4, 30}, 2, 1, std::nullopt}}; });
  check_bad([](GeneratorConfig& c) { c.hotspots = {{"h", 1, {5, 1}, {4, 30}, 2, 1, std::nullopt}}; });
  check_bad([](GeneratorConfig& c) { c.hotspots = {{"h", 1, {4, 1}, {4, 30}, 2, 1, MonthDay{6, 1}}}; });
  check_bad([](GeneratorConfig& c) { c.hotspots = {{"a,b", 1, {4, 1}, {4, 30}, 2, 1, std::nullopt}}; });
  check_bad([](GeneratorConfig& c) {
    c.hotspots = {{"h", 1, {4, 1}, {4, 30}, 2, 1, std::nullopt}, {"h", 2, {4, 1}, {4, 30}, 2, 1, std::nullopt}};
  });
  CHECK_NOTHROW(GeneratorConfig::desk_scale().validate());
  auto c = small_config();
  CHECK_THROWS_AS(generate(c, make_registry(4, 1), [](const SearchRecord&) {}), Error);
}

TEST_CASE("write_corpus produces consistent files") {
  testing::TempDir dir("synth_corpus");
  auto c = small_config();
  c.base_rate = 0.2;
  c.years = {2023, 2024};
  c.specified_fraction = 0.5;
  c.hotspots = {{"bloom", 3, {4, 1}, {4, 20}, 5.0, 1.0, MonthDay{4, 10}}};
  const auto files = write_corpus(c, dir.path());
  CHECK(std::filesystem::file_size(files.logs) == files.log_bytes);
  REQUIRE(files.ground_truth.size() == 2);

  const auto reg = load_registry_csv(files.registry);
  CHECK(reg.size() == 5);
  std::ifstream logs(files.logs);
  std::string line;
  std::uint64_t n = 0;
  while (std::getline(logs, line)) {
    parse_record(line, RecordFormat{}, ++n);
  }
  CHECK(n == files.records);

  const auto presets = load_season_presets(files.season_presets);
  REQUIRE(presets.size() == 1);
  CHECK(presets[0].label == "bloom");
  CHECK(presets[0].dest_ids == std::vector<std::string>{reg.at(3).ic_id});

  std::ifstream peaks(files.planted_peaks);
  std::getline(peaks, line);
  CHECK(line == "label,dest_index,year,day_index,intensity");
  std::getline(peaks, line);
  CHECK(line.rfind("bloom,3,2023,99,", 0) == 0);

  std::ifstream truth(files.ground_truth[1]);
  std::getline(truth, line);
  CHECK(line == "dest_index,day_index,intensity");
  std::size_t rows = 0;
  while (std::getline(truth, line)) ++rows;
  CHECK(rows == 5 * 366);
}
