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
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "odmap/model.hpp"
#include "odmap/trend.hpp"

namespace odmap {

/// A destination with elevated demand during a month-day season.
///
/// Inside the season the destination's intensity is multiplied by a seasonal
/// factor and, on Saturdays and Sundays, by `weekend_multiplier`. Without a
/// `peak` the seasonal factor is flat at `peak_multiplier`. With a `peak` it
/// is triangular: `peak_multiplier` on the peak day, falling linearly toward
/// 1 one day beyond each season edge.
struct Hotspot {
  std::string label;
  std::uint32_t destination = 0;
  MonthDay season_start;
  MonthDay season_end;
  double peak_multiplier = 1.0;
  double weekend_multiplier = 1.0;
  std::optional<MonthDay> peak;
};

struct GeneratorConfig {
  std::uint64_t seed = 1;
  std::vector<int> years{2023, 2024};
  std::uint32_t n_ics = 200;
  /// Mean searches per OD pair per day, before popularity and seasonal factors.
  double base_rate = 0.0;
  std::vector<Hotspot> hotspots;
  double specified_fraction = 0.3;
  /// Multiplicative growth per year after the first configured year.
  double yearly_growth = 1.0;
  std::uint32_t lookahead_days = 30;
  /// Zipf exponent of IC popularity (0 = all pairs equally likely). Weights
  /// are normalized to mean 1 and applied to both origin and destination.
  double popularity_exponent = 0.0;

  /// Throws Error(InvalidArgument) describing the first violated constraint.
  void validate() const;

  /// 200 ICs, 2023-2024, roughly 100k records, three seasonal hotspots.
  static GeneratorConfig desk_scale();
};

struct PlantedPeak {
  std::string label;
  std::uint32_t destination = 0;
  int year = 0;
  std::uint32_t day_index = 0;
  double intensity = 0.0;
};

/// Intensities the corpus was drawn from. intensity(y, j, t) is the mean
/// count per OD pair (averaged over origins) for destination j on day t;
/// the expected number of arrivals at j that day is n_ics times that.
struct GroundTruth {
  std::vector<int> years;
  std::uint32_t n_ics = 0;
  /// Popularity weight per registry index, mean 1.
  std::vector<double> popularity;
  /// Per year: n_ics x n_days, destination-major.
  std::vector<std::vector<double>> table;
  std::vector<PlantedPeak> peaks;

  double intensity(std::size_t year_slot, std::uint32_t destination, std::uint32_t t) const;
  /// Expected count of S[i][j][t] for the given year slot.
  double cell_intensity(std::size_t year_slot, std::uint32_t origin, std::uint32_t destination,
                        std::uint32_t t) const;
};

/// n_ics synthetic interchanges with distinct coordinates inside a Japan-sized
/// lon/lat box, ids `IC0000`.. in generation order. Deterministic in seed.
IcRegistry make_registry(std::uint32_t n_ics, std::uint64_t seed);

using RecordSink = std::function<void(const SearchRecord&)>;

struct GenerateResult {
  std::uint64_t records = 0;
  GroundTruth truth;
};

/// Draws the corpus, passing each record to `sink` in a fixed order.
GenerateResult generate(const GeneratorConfig& config, const IcRegistry& registry,
                        const RecordSink& sink);

/// Same as generate, writing log CSV lines (no header) to `out`.
GenerateResult generate_csv(const GeneratorConfig& config, const IcRegistry& registry,
                            std::ostream& out);

void write_ground_truth_csv(std::ostream& out, const GroundTruth& truth, std::size_t year_slot);
void write_planted_peaks_csv(std::ostream& out, const GroundTruth& truth);

/// Season windows matching the configured hotspots, one per hotspot label.
std::vector<SeasonWindow> hotspot_windows(const GeneratorConfig& config, const IcRegistry& registry);

struct CorpusFiles {
  std::string registry;
  std::string logs;
  std::vector<std::string> ground_truth;
  std::string planted_peaks;
  std::string season_presets;
  std::uint64_t records = 0;
  std::uint64_t log_bytes = 0;
};

/// Writes registry.csv, logs.csv, ground_truth_<year>.csv, planted_peaks.csv
/// and season_presets.csv into `dir` (created if missing).
CorpusFiles write_corpus(const GeneratorConfig& config, const std::string& dir);

}  // namespace odmap
