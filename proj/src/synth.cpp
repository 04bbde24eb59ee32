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

#include "odmap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <utility>

#include "odmap/error.hpp"

namespace odmap {

namespace {

constexpr std::uint64_t kPopularityStream = 0x9e3779b97f4a7c15ull;
constexpr double kPastSpecifiedShare = 0.25;

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, "generator config: " + what);
}

std::string ic_name(std::uint32_t k) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "IC%04u", k);
  return buf;
}

double round6(double v) { return std::round(v * 1e6) / 1e6; }

std::vector<double> popularity_weights(std::uint32_t n, double exponent, std::uint64_t seed) {
  std::vector<double> w(n, 1.0);
  if (exponent == 0.0 || n == 0) return w;
  std::vector<std::uint32_t> rank(n);
  std::iota(rank.begin(), rank.end(), 0u);
  std::mt19937_64 rng(seed ^ kPopularityStream);
  std::shuffle(rank.begin(), rank.end(), rng);
  double sum = 0.0;
  for (std::uint32_t k = 0; k < n; ++k) {
    w[k] = std::pow(static_cast<double>(rank[k] + 1), -exponent);
    sum += w[k];
  }
  for (auto& v : w) v *= static_cast<double>(n) / sum;
  return w;
}

/// Seasonal and weekend factor of one hotspot on day t (1 outside the season).
double hotspot_factor(const Hotspot& h, int year, std::uint32_t t) {
  const SeasonWindow window{h.label, h.season_start, h.season_end, {}};
  const DayRange range = window_range(window, year);
  if (t < range.start || t >= range.end) return 1.0;
  double factor = h.peak_multiplier;
  if (h.peak) {
    const double p = static_cast<double>(*day_index(Date{year, h.peak->month, std::min(h.peak->day, days_in_month(year, h.peak->month))}, year));
    const double lo = static_cast<double>(range.start) - 1.0;
    const double hi = static_cast<double>(range.end);
    const double x = static_cast<double>(t);
    const double frac = x <= p ? (x - lo) / (p - lo) : (hi - x) / (hi - p);
    factor = 1.0 + (h.peak_multiplier - 1.0) * frac;
  }
  if (is_weekend(date_at(year, t))) factor *= h.weekend_multiplier;
  return factor;
}

}  // namespace

void GeneratorConfig::validate() const {
  if (n_ics < 1) invalid("n_ics must be at least 1");
  if (years.empty()) invalid("at least one year is required");
  for (int y : years) {
    if (y < 1 || y > 9999) invalid("year out of range: " + std::to_string(y));
  }
  if (!(base_rate >= 0.0) || !std::isfinite(base_rate)) invalid("base_rate must be >= 0");
  if (!(specified_fraction >= 0.0 && specified_fraction <= 1.0)) {
    invalid("specified_fraction must be in [0, 1]");
  }
  if (!(yearly_growth > 0.0) || !std::isfinite(yearly_growth)) invalid("yearly_growth must be > 0");
  if (lookahead_days < 1) invalid("lookahead_days must be at least 1");
  if (!(popularity_exponent >= 0.0) || !std::isfinite(popularity_exponent)) {
    invalid("popularity_exponent must be >= 0");
  }
  std::set<std::string> labels;
  for (const auto& h : hotspots) {
    if (h.destination >= n_ics) invalid("hotspot destination out of range");
    if (!(h.peak_multiplier >= 0.0) || !(h.weekend_multiplier >= 0.0)) {
      invalid("hotspot multipliers must be >= 0");
    }
    if (h.season_end < h.season_start) invalid("hotspot season ends before it starts");
    if (h.peak && (*h.peak < h.season_start || h.season_end < *h.peak)) {
      invalid("hotspot peak outside its season");
    }
    if (h.label.empty() || h.label.find_first_of(",;\n") != std::string::npos) {
      invalid("hotspot label must be non-empty without ',' or ';'");
    }
    if (!labels.insert(h.label).second) invalid("duplicate hotspot label " + h.label);
  }
}

GeneratorConfig GeneratorConfig::desk_scale() {
  GeneratorConfig c;
  c.seed = 20210401;
  c.years = {2023, 2024};
  c.n_ics = 200;
  c.base_rate = 0.003;
  c.specified_fraction = 0.3;
  c.yearly_growth = 1.2;
  c.lookahead_days = 30;
  c.popularity_exponent = 1.5;
  c.hotspots = {
      {"nemophila", 40, {3, 15}, {5, 30}, 10.0, 1.5, MonthDay{5, 3}},
      {"foliage", 100, {9, 25}, {12, 10}, 10.0, 1.5, MonthDay{10, 28}},
      {"ski", 160, {1, 1}, {3, 31}, 10.0, 1.5, MonthDay{2, 11}},
  };
  return c;
}

double GroundTruth::intensity(std::size_t year_slot, std::uint32_t destination,
                              std::uint32_t t) const {
  const auto n_days = static_cast<std::size_t>(days_in_year(years.at(year_slot)));
  return table.at(year_slot).at(destination * n_days + t);
}

double GroundTruth::cell_intensity(std::size_t year_slot, std::uint32_t origin,
                                   std::uint32_t destination, std::uint32_t t) const {
  return popularity.at(origin) * intensity(year_slot, destination, t);
}

IcRegistry make_registry(std::uint32_t n_ics, std::uint64_t seed) {
  if (n_ics < 1) throw Error(ErrorCode::InvalidArgument, "n_ics must be at least 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lon(129.5, 145.5);
  std::uniform_real_distribution<double> lat(31.0, 45.5);
  std::set<std::pair<double, double>> seen;
  std::vector<InterchangeRecord> entries;
  entries.reserve(n_ics);
  while (entries.size() < n_ics) {
    const double x = round6(lon(rng));
    const double y = round6(lat(rng));
    if (!seen.emplace(x, y).second) continue;
    const auto k = static_cast<std::uint32_t>(entries.size());
    entries.push_back({ic_name(k), "Synthetic IC " + std::to_string(k), x, y});
  }
  return IcRegistry::build(std::move(entries));
}

GenerateResult generate(const GeneratorConfig& config, const IcRegistry& registry,
                        const RecordSink& sink) {
  config.validate();
  if (registry.size() != config.n_ics) {
    throw Error(ErrorCode::Mismatch, "registry size does not match generator n_ics");
  }
  const std::uint32_t n = config.n_ics;
  GenerateResult result;
  GroundTruth& truth = result.truth;
  truth.years = config.years;
  truth.n_ics = n;
  truth.popularity = popularity_weights(n, config.popularity_exponent, config.seed);
  const int first_year = *std::min_element(config.years.begin(), config.years.end());

  for (int year : config.years) {
    const auto n_days = static_cast<std::uint32_t>(days_in_year(year));
    const double growth = std::pow(config.yearly_growth, year - first_year);
    std::vector<double> table(static_cast<std::size_t>(n) * n_days);
    for (std::uint32_t j = 0; j < n; ++j) {
      for (std::uint32_t t = 0; t < n_days; ++t) {
        double v = config.base_rate * truth.popularity[j] * growth;
        for (const auto& h : config.hotspots) {
          if (h.destination == j) v *= hotspot_factor(h, year, t);
        }
        table[static_cast<std::size_t>(j) * n_days + t] = v;
      }
    }
    for (const auto& h : config.hotspots) {
      const DayRange range = window_range(SeasonWindow{h.label, h.season_start, h.season_end, {}}, year);
      PlantedPeak peak{h.label, h.destination, year, range.start, -1.0};
      for (std::uint32_t t = range.start; t < range.end; ++t) {
        const double v = table[static_cast<std::size_t>(h.destination) * n_days + t];
        if (v > peak.intensity) {
          peak.intensity = v;
          peak.day_index = t;
        }
      }
      truth.peaks.push_back(peak);
    }
    truth.table.push_back(std::move(table));
  }

  std::mt19937_64 rng(config.seed);
  std::discrete_distribution<std::uint32_t> pick_origin(truth.popularity.begin(), truth.popularity.end());
  std::uniform_int_distribution<int> minute_of_day(0, 1439);
  std::uniform_int_distribution<std::int64_t> ahead(1, std::int64_t{config.lookahead_days} * 1440);
  std::uniform_int_distribution<std::int64_t> behind(0, std::int64_t{config.lookahead_days} * 1440);
  std::bernoulli_distribution is_specified(config.specified_fraction);
  std::bernoulli_distribution has_past_time(kPastSpecifiedShare);

  SearchRecord rec;
  for (std::size_t slot = 0; slot < config.years.size(); ++slot) {
    const int year = config.years[slot];
    const auto n_days = static_cast<std::uint32_t>(days_in_year(year));
    const std::int64_t jan1 = to_days(Date{year, 1, 1}) * 1440;
    for (std::uint32_t t = 0; t < n_days; ++t) {
      for (std::uint32_t j = 0; j < n; ++j) {
        const double mean = static_cast<double>(n) * truth.table[slot][static_cast<std::size_t>(j) * n_days + t];
        if (!(mean > 0.0)) continue;
        std::poisson_distribution<std::uint64_t> draw(mean);
        const std::uint64_t count = draw(rng);
        for (std::uint64_t c = 0; c < count; ++c) {
          const std::uint32_t i = pick_origin(rng);
          const std::int64_t at = jan1 + std::int64_t{t} * 1440 + minute_of_day(rng);
          if (is_specified(rng)) {
            rec.specified_time = from_minutes(at);
            rec.search_time = from_minutes(at - ahead(rng));
          } else {
            rec.search_time = from_minutes(at);
            if (has_past_time(rng)) {
              rec.specified_time = from_minutes(at - behind(rng));
            } else {
              rec.specified_time.reset();
            }
          }
          rec.departure_ic = registry.at(i).ic_id;
          rec.arrival_ic = registry.at(j).ic_id;
          sink(rec);
          ++result.records;
        }
      }
    }
  }
  return result;
}

GenerateResult generate_csv(const GeneratorConfig& config, const IcRegistry& registry,
                            std::ostream& out) {
  std::string line;
  return generate(config, registry, [&](const SearchRecord& r) {
    line = format_record(r);
    line += '\n';
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
  });
}

void write_ground_truth_csv(std::ostream& out, const GroundTruth& truth, std::size_t year_slot) {
  out << "dest_index,day_index,intensity\n";
  const auto n_days = static_cast<std::uint32_t>(days_in_year(truth.years.at(year_slot)));
  char buf[64];
  for (std::uint32_t j = 0; j < truth.n_ics; ++j) {
    for (std::uint32_t t = 0; t < n_days; ++t) {
      std::snprintf(buf, sizeof(buf), "%u,%u,%.9g\n", j, t, truth.intensity(year_slot, j, t));
      out << buf;
    }
  }
}

void write_planted_peaks_csv(std::ostream& out, const GroundTruth& truth) {
  out << "label,dest_index,year,day_index,intensity\n";
  char buf[128];
  for (const auto& p : truth.peaks) {
    std::snprintf(buf, sizeof(buf), ",%u,%d,%u,%.9g\n", p.destination, p.year, p.day_index, p.intensity);
    out << p.label << buf;
  }
}

std::vector<SeasonWindow> hotspot_windows(const GeneratorConfig& config, const IcRegistry& registry) {
  std::vector<SeasonWindow> out;
  for (const auto& h : config.hotspots) {
    out.push_back({h.label, h.season_start, h.season_end, {registry.at(h.destination).ic_id}});
  }
  return out;
}

CorpusFiles write_corpus(const GeneratorConfig& config, const std::string& dir) {
  config.validate();
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create directory " + dir + ": " + ec.message());
  const fs::path root(dir);
  auto open = [](const fs::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + p.string() + " for writing");
    return out;
  };
  auto finish = [](std::ofstream& out, const fs::path& p) {
    out.close();
    if (!out) throw Error(ErrorCode::Io, "write failed for " + p.string());
  };

  CorpusFiles files;
  const IcRegistry registry = make_registry(config.n_ics, config.seed);
  files.registry = (root / "registry.csv").string();
  {
    auto out = open(files.registry);
    write_registry_csv(out, registry);
    finish(out, files.registry);
  }
  files.logs = (root / "logs.csv").string();
  GenerateResult gen;
  {
    auto out = open(files.logs);
    gen = generate_csv(config, registry, out);
    out.flush();
    files.log_bytes = static_cast<std::uint64_t>(out.tellp());
    finish(out, files.logs);
  }
  files.records = gen.records;
  for (std::size_t slot = 0; slot < config.years.size(); ++slot) {
    const fs::path p = root / ("ground_truth_" + std::to_string(config.years[slot]) + ".csv");
    auto out = open(p);
    write_ground_truth_csv(out, gen.truth, slot);
    finish(out, p);
    files.ground_truth.push_back(p.string());
  }
  files.planted_peaks = (root / "planted_peaks.csv").string();
  {
    auto out = open(files.planted_peaks);
    write_planted_peaks_csv(out, gen.truth);
    finish(out, files.planted_peaks);
  }
  files.season_presets = (root / "season_presets.csv").string();
  {
    auto out = open(files.season_presets);
    const auto windows = hotspot_windows(config, registry);
    write_season_presets(out, windows);
    finish(out, files.season_presets);
  }
  return files;
}

}  // namespace odmap
