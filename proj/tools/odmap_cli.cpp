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

// odmap: command-line front end over the odmap C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "odmap/odmap.h"

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;
constexpr const char* kOutDirEnv = "ODMAP_OUT_DIR";

struct RegistryDeleter {
  void operator()(odm_registry* r) const { odm_registry_free(r); }
};
struct TensorDeleter {
  void operator()(odm_tensor* t) const { odm_tensor_free(t); }
};
struct SeasonDeleter {
  void operator()(odm_season* s) const { odm_season_free(s); }
};
struct StringDeleter {
  void operator()(char* s) const { odm_string_free(s); }
};
using RegistryPtr = std::unique_ptr<odm_registry, RegistryDeleter>;
using TensorPtr = std::unique_ptr<odm_tensor, TensorDeleter>;
using SeasonPtr = std::unique_ptr<odm_season, SeasonDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

/// Carries a C API failure up to main().
class ApiFailure : public std::runtime_error {
 public:
  explicit ApiFailure(odm_status status)
      : std::runtime_error(odm_last_error_message()), status_(status) {}
  odm_status status() const { return status_; }

 private:
  odm_status status_;
};

void check(odm_status status) {
  if (status != ODM_OK) throw ApiFailure(status);
}

std::string default_out_dir() {
  const char* env = std::getenv(kOutDirEnv);
  return env && *env ? env : ".";
}

RegistryPtr open_registry(const std::string& path) {
  odm_registry* r = nullptr;
  check(odm_registry_load(path.c_str(), &r));
  return RegistryPtr(r);
}

TensorPtr open_tensor(const std::string& path) {
  odm_tensor* t = nullptr;
  check(odm_tensor_load(path.c_str(), &t));
  return TensorPtr(t);
}

odm_tensor_info info_of(const odm_tensor* t) {
  odm_tensor_info info{};
  check(odm_tensor_get_info(t, &info));
  return info;
}

void emit(const StringPtr& csv, const std::string& output) {
  if (output.empty() || output == "-") {
    std::fputs(csv.get(), stdout);
    return;
  }
  std::ofstream out(output, std::ios::binary | std::ios::trunc);
  if (!out) throw std::invalid_argument("cannot write " + output);
  out << csv.get();
}

void write_file(const std::filesystem::path& path, const StringPtr& csv) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::invalid_argument("cannot write " + path.string());
  out << csv.get();
}

const CLI::Validator kDate(
    [](std::string& text) -> std::string {
      uint32_t ignored = 0;
      const int32_t year = text.size() >= 4 ? std::atoi(text.substr(0, 4).c_str()) : 0;
      if (text.size() != 10 || odm_day_index(year, text.c_str(), &ignored) != ODM_OK) {
        return "expected a calendar date YYYY-MM-DD, got '" + text + "'";
      }
      return {};
    },
    "YYYY-MM-DD");

/// Translates optional inclusive --from/--to dates into a half-open range
/// for the tensor's year; absent ends default to the year's bounds.
std::pair<uint32_t, uint32_t> day_range(const odm_tensor* tensor, const std::string& from,
                                        const std::string& to) {
  const auto info = info_of(tensor);
  char first[16], last[16];
  std::snprintf(first, sizeof(first), "%04d-01-01", info.year);
  std::snprintf(last, sizeof(last), "%04d-12-31", info.year);
  uint32_t start = 0, end = 0;
  check(odm_date_range(info.year, from.empty() ? first : from.c_str(),
                       to.empty() ? last : to.c_str(), &start, &end));
  return {start, end};
}

struct HotspotArg {
  std::string label, start, end, peak;
  uint32_t destination = 0;
  double multiplier = 1.0, weekend = 1.0;
};

/// label:dest_index:MM-DD:MM-DD:multiplier:weekend_multiplier[:peak MM-DD]
HotspotArg parse_hotspot(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.size() != 6 && parts.size() != 7) {
    throw CLI::ValidationError("--hotspot",
                               "expected label:dest:MM-DD:MM-DD:mult:weekend[:peak], got " + spec);
  }
  HotspotArg h;
  h.label = parts[0];
  try {
    h.destination = static_cast<uint32_t>(std::stoul(parts[1]));
    h.multiplier = std::stod(parts[4]);
    h.weekend = std::stod(parts[5]);
  } catch (const std::exception&) {
    throw CLI::ValidationError("--hotspot", "non-numeric field in " + spec);
  }
  h.start = parts[2];
  h.end = parts[3];
  if (parts.size() == 7) h.peak = parts[6];
  return h;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build and query Origin x Destination x Day route-search count tensors"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(odm_version()));

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic log corpus with ground truth");
  odm_generator_config gcfg{};
  odm_generator_defaults(&gcfg);
  std::string gen_out;
  std::vector<int32_t> gen_years(gcfg.years, gcfg.years + gcfg.n_years);
  std::vector<std::string> hotspot_specs;
  bool no_hotspots = false;
  gen->add_option("-o,--out", gen_out, "Output directory (default $ODMAP_OUT_DIR or .)");
  gen->add_option("--seed", gcfg.seed, "RNG seed")->capture_default_str();
  gen->add_option("--years", gen_years, "Calendar years")->delimiter(',')->capture_default_str();
  gen->add_option("--n-ics", gcfg.n_ics, "Number of interchanges")->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--base-rate", gcfg.base_rate, "Mean searches per OD pair per day")->capture_default_str();
  gen->add_option("--specified-fraction", gcfg.specified_fraction, "Share of forward-dated searches")
      ->capture_default_str();
  gen->add_option("--growth", gcfg.yearly_growth, "Yearly volume growth factor")->capture_default_str();
  gen->add_option("--lookahead", gcfg.lookahead_days, "Max days between search and specified time")
      ->capture_default_str();
  gen->add_option("--popularity-exponent", gcfg.popularity_exponent, "Zipf exponent of IC popularity")
      ->capture_default_str();
  gen->add_option("--hotspot", hotspot_specs,
                  "label:dest_index:MM-DD:MM-DD:multiplier:weekend_multiplier[:peak MM-DD] "
                  "(replaces the default hotspots)");
  gen->add_flag("--no-hotspots", no_hotspots, "Generate background traffic only");

  // build
  auto* build = app.add_subcommand("build", "Build both category tensors for one year from a log CSV");
  std::string build_registry, build_logs, build_out;
  odm_build_options bopts{};
  bool b_header = false, b_skip_unknown = false, b_skip_malformed = false;
  build->add_option("--registry", build_registry, "IC registry CSV")->required()->check(CLI::ExistingFile);
  build->add_option("--logs", build_logs, "Search log CSV")->required()->check(CLI::ExistingFile);
  build->add_option("--year", bopts.year, "Calendar year")->required()->check(CLI::Range(1, 9999));
  build->add_option("--out-dir", build_out, "Output directory (default $ODMAP_OUT_DIR or .)");
  build->add_flag("--header", b_header, "Log CSV starts with a header row");
  build->add_flag("--skip-unknown-ic", b_skip_unknown, "Count and drop records with unknown ICs");
  build->add_flag("--skip-malformed", b_skip_malformed, "Count and drop unparseable rows");
  build->add_option("--threads", bopts.threads, "Worker threads")->default_val(1u);

  // query
  auto* query = app.add_subcommand("query", "Query a tensor file");
  query->require_subcommand(1);
  std::string q_tensor, q_registry, q_from, q_to, q_dest, q_output;
  uint32_t q_k = 10;
  auto add_common = [&](CLI::App* sub, bool needs_registry) {
    sub->add_option("--tensor", q_tensor, "Tensor file")->required()->check(CLI::ExistingFile);
    auto* reg = sub->add_option("--registry", q_registry, "IC registry CSV")->check(CLI::ExistingFile);
    if (needs_registry) reg->required();
    sub->add_option("--from", q_from, "First date, inclusive")->check(kDate);
    sub->add_option("--to", q_to, "Last date, inclusive")->check(kDate);
    sub->add_option("-o,--output", q_output, "Output CSV (default stdout)");
  };
  auto* q_sum = query->add_subcommand("sum", "Per-destination totals summed over origins");
  add_common(q_sum, true);
  auto* q_slice = query->add_subcommand("slice", "Day-summed OD matrix as sparse triplets");
  add_common(q_slice, false);
  auto* q_topk = query->add_subcommand("topk", "Top origins toward one destination");
  add_common(q_topk, true);
  q_topk->add_option("--dest", q_dest, "Destination ic_id")->required();
  q_topk->add_option("--k", q_k, "Number of origins")->capture_default_str()->check(CLI::PositiveNumber);
  auto* q_series = query->add_subcommand("series", "Daily arrivals at a destination set");
  add_common(q_series, true);
  q_series->add_option("--dest", q_dest, "Destination ic_id(s), semicolon-separated")->required();

  // trend
  auto* trend = app.add_subcommand("trend", "Trend reports");
  trend->require_subcommand(1);
  auto* t_monthly = trend->add_subcommand("monthly", "Monthly totals of one tensor");
  std::string t_tensor, t_output;
  t_monthly->add_option("--tensor", t_tensor, "Tensor file")->required()->check(CLI::ExistingFile);
  t_monthly->add_option("-o,--output", t_output, "Output CSV (default stdout)");
  auto* t_season = trend->add_subcommand("season", "Seasonal daily series, one CSV per year");
  std::vector<std::string> s_tensors;
  std::string s_registry, s_presets, s_preset, s_window, s_holidays, s_out, s_category = "specified";
  uint32_t s_peaks = 0;
  t_season->add_option("--tensors", s_tensors, "Tensor files, one per year")->required()->check(CLI::ExistingFile);
  t_season->add_option("--registry", s_registry, "IC registry CSV")->required()->check(CLI::ExistingFile);
  auto* o_presets = t_season->add_option("--presets", s_presets, "Season presets CSV")->check(CLI::ExistingFile);
  auto* o_preset = t_season->add_option("--preset", s_preset, "Preset label");
  auto* o_window = t_season->add_option("--window", s_window, "label,MM-DD,MM-DD,ic_id[;ic_id...]");
  o_preset->needs(o_presets);
  o_window->excludes(o_preset);
  t_season->add_option("--holidays", s_holidays, "Holiday dates CSV")->check(CLI::ExistingFile);
  t_season->add_option("--out-dir", s_out, "Output directory (default $ODMAP_OUT_DIR or .)");
  t_season->add_option("--category", s_category, "Tensor category to use")
      ->check(CLI::IsMember({"specified", "unspecified"}))
      ->capture_default_str();
  t_season->add_option("--peaks", s_peaks, "Also write the k highest days per year");

  // info
  auto* info = app.add_subcommand("info", "Print the header of a tensor file");
  std::string i_tensor;
  info->add_option("--tensor", i_tensor, "Tensor file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) {
      const std::string dir = gen_out.empty() ? default_out_dir() : gen_out;
      gcfg.years = gen_years.data();
      gcfg.n_years = gen_years.size();
      std::vector<HotspotArg> parsed;
      for (const auto& spec : hotspot_specs) parsed.push_back(parse_hotspot(spec));
      std::vector<odm_hotspot> hotspots;
      for (const auto& h : parsed) {
        hotspots.push_back({h.label.c_str(), h.destination, h.start.c_str(), h.end.c_str(),
                            h.peak.empty() ? nullptr : h.peak.c_str(), h.multiplier, h.weekend});
      }
      if (no_hotspots) {
        gcfg.hotspots = nullptr;
        gcfg.n_hotspots = 0;
      } else if (!hotspots.empty()) {
        gcfg.hotspots = hotspots.data();
        gcfg.n_hotspots = hotspots.size();
      }
      odm_generate_report rep{};
      check(odm_generate(&gcfg, dir.c_str(), &rep));
      std::printf("metric,value\nrecords,%llu\nlog_bytes,%llu\nout_dir,%s\n",
                  static_cast<unsigned long long>(rep.records),
                  static_cast<unsigned long long>(rep.log_bytes), dir.c_str());
    } else if (*build) {
      const std::string dir = build_out.empty() ? default_out_dir() : build_out;
      std::filesystem::create_directories(dir);
      bopts.has_header = b_header;
      bopts.skip_unknown_ic = b_skip_unknown;
      bopts.skip_malformed = b_skip_malformed;
      auto registry = open_registry(build_registry);
      odm_tensor* u = nullptr;
      odm_tensor* s = nullptr;
      odm_ingest_report rep{};
      check(odm_build_from_csv(registry.get(), build_logs.c_str(), &bopts, &u, &s, &rep));
      TensorPtr unspecified(u), specified(s);
      const auto base = std::filesystem::path(dir) / ("od_" + std::to_string(bopts.year));
      const std::string u_path = base.string() + "_unspecified.od3d";
      const std::string s_path = base.string() + "_specified.od3d";
      uint64_t u_bytes = 0, s_bytes = 0;
      check(odm_tensor_save(unspecified.get(), u_path.c_str(), &u_bytes));
      check(odm_tensor_save(specified.get(), s_path.c_str(), &s_bytes));
      std::printf(
          "metric,value\nread,%llu\naccepted_unspecified,%llu\naccepted_specified,%llu\n"
          "out_of_year,%llu\nunknown_ic_skipped,%llu\nmalformed_skipped,%llu\n"
          "unspecified_file,%s\nunspecified_bytes,%llu\nspecified_file,%s\nspecified_bytes,%llu\n",
          static_cast<unsigned long long>(rep.read),
          static_cast<unsigned long long>(rep.accepted_unspecified),
          static_cast<unsigned long long>(rep.accepted_specified),
          static_cast<unsigned long long>(rep.out_of_year),
          static_cast<unsigned long long>(rep.unknown_ic),
          static_cast<unsigned long long>(rep.malformed), u_path.c_str(),
          static_cast<unsigned long long>(u_bytes), s_path.c_str(),
          static_cast<unsigned long long>(s_bytes));
    } else if (*query) {
      auto tensor = open_tensor(q_tensor);
      RegistryPtr registry;
      if (!q_registry.empty()) registry = open_registry(q_registry);
      const auto [start, end] = day_range(tensor.get(), q_from, q_to);
      char* raw = nullptr;
      if (*q_sum) {
        check(odm_query_sum_csv(tensor.get(), registry.get(), start, end, &raw));
      } else if (*q_slice) {
        check(odm_query_slice_csv(tensor.get(), start, end, &raw));
      } else if (*q_topk) {
        check(odm_query_topk_csv(tensor.get(), registry.get(), q_dest.c_str(), start, end, q_k, &raw));
      } else {
        check(odm_query_series_csv(tensor.get(), registry.get(), q_dest.c_str(), start, end, &raw));
      }
      emit(StringPtr(raw), q_output);
    } else if (*trend) {
      if (*t_monthly) {
        auto tensor = open_tensor(t_tensor);
        char* raw = nullptr;
        check(odm_trend_monthly_csv(tensor.get(), &raw));
        emit(StringPtr(raw), t_output);
      } else {
        if (s_preset.empty() && s_window.empty()) {
          throw CLI::RequiredError("--preset (with --presets) or --window");
        }
        odm_season* raw_season = nullptr;
        if (!s_preset.empty()) {
          check(odm_season_from_presets(s_presets.c_str(), s_preset.c_str(), &raw_season));
        } else {
          std::vector<std::string> parts;
          std::stringstream ss(s_window);
          std::string part;
          while (std::getline(ss, part, ',')) parts.push_back(part);
          if (parts.size() != 4) throw CLI::ValidationError("--window", "expected label,MM-DD,MM-DD,ids");
          check(odm_season_create(parts[0].c_str(), parts[1].c_str(), parts[2].c_str(),
                                  parts[3].c_str(), &raw_season));
        }
        SeasonPtr season(raw_season);
        auto registry = open_registry(s_registry);
        const odm_category wanted =
            s_category == "specified" ? ODM_CATEGORY_SPECIFIED : ODM_CATEGORY_UNSPECIFIED;
        std::vector<TensorPtr> tensors;
        for (const auto& path : s_tensors) {
          auto t = open_tensor(path);
          if (info_of(t.get()).category == wanted) tensors.push_back(std::move(t));
        }
        if (tensors.empty()) {
          std::fprintf(stderr, "error: none of the tensors has category %s\n", s_category.c_str());
          return kExitData;
        }
        std::stable_sort(tensors.begin(), tensors.end(), [](const TensorPtr& a, const TensorPtr& b) {
          return info_of(a.get()).year < info_of(b.get()).year;
        });
        const std::filesystem::path dir = s_out.empty() ? default_out_dir() : s_out;
        std::filesystem::create_directories(dir);
        const std::string label = odm_season_label(season.get());
        std::printf("file\n");
        for (const auto& t : tensors) {
          const int year = info_of(t.get()).year;
          char* raw = nullptr;
          check(odm_trend_season_csv(t.get(), registry.get(), season.get(),
                                     s_holidays.empty() ? nullptr : s_holidays.c_str(), &raw));
          StringPtr csv(raw);
          const auto path = dir / (label + "_" + std::to_string(year) + ".csv");
          write_file(path, csv);
          std::printf("%s\n", path.string().c_str());
          if (s_peaks > 0) {
            check(odm_trend_peaks_csv(t.get(), registry.get(), season.get(), s_peaks, &raw));
            StringPtr peaks(raw);
            const auto ppath = dir / (label + "_" + std::to_string(year) + "_peaks.csv");
            write_file(ppath, peaks);
            std::printf("%s\n", ppath.string().c_str());
          }
        }
        if (tensors.size() >= 2) {
          std::vector<const odm_tensor*> views;
          for (const auto& t : tensors) views.push_back(t.get());
          char* raw = nullptr;
          check(odm_trend_yoy_csv(views.data(), views.size(), registry.get(), season.get(), &raw));
          StringPtr csv(raw);
          const auto path = dir / (label + "_yoy.csv");
          write_file(path, csv);
          std::printf("%s\n", path.string().c_str());
        }
      }
    } else if (*info) {
      auto tensor = open_tensor(i_tensor);
      char* raw = nullptr;
      check(odm_tensor_info_csv(tensor.get(), &raw));
      emit(StringPtr(raw), "");
    }
  } catch (const ApiFailure& e) {
    std::fprintf(stderr, "error: %s: %s\n", odm_status_name(e.status()), e.what());
    return e.status() == ODM_ERR_IO || e.status() == ODM_ERR_INVALID_ARGUMENT ? kExitUsage : kExitData;
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return 0;
}
