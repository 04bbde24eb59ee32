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

#include "odmap/odmap.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "odmap/error.hpp"
#include "odmap/model.hpp"
#include "odmap/query.hpp"
#include "odmap/synth.hpp"
#include "odmap/tensor.hpp"
#include "odmap/tensor_io.hpp"
#include "odmap/trend.hpp"

struct odm_registry {
  odmap::IcRegistry impl;
};

struct odm_tensor {
  odmap::OdTensor impl;
};

struct odm_season {
  odmap::SeasonWindow impl;
};

namespace {

thread_local std::string last_message;

odm_status to_status(odmap::ErrorCode code) {
  using odmap::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return ODM_ERR_INVALID_ARGUMENT;
    case ErrorCode::Parse: return ODM_ERR_PARSE;
    case ErrorCode::Io: return ODM_ERR_IO;
    case ErrorCode::UnknownIc: return ODM_ERR_UNKNOWN_IC;
    case ErrorCode::DuplicateIc: return ODM_ERR_DUPLICATE_IC;
    case ErrorCode::Overflow: return ODM_ERR_OVERFLOW;
    case ErrorCode::BadMagic: return ODM_ERR_BAD_MAGIC;
    case ErrorCode::VersionMismatch: return ODM_ERR_VERSION_MISMATCH;
    case ErrorCode::Truncated: return ODM_ERR_TRUNCATED;
    case ErrorCode::ChecksumMismatch: return ODM_ERR_CHECKSUM;
    case ErrorCode::Corrupt: return ODM_ERR_CORRUPT;
    case ErrorCode::Mismatch: return ODM_ERR_MISMATCH;
    case ErrorCode::InvalidRange: return ODM_ERR_INVALID_RANGE;
    case ErrorCode::MissingYear: return ODM_ERR_MISSING_YEAR;
  }
  return ODM_ERR_INTERNAL;
}

odm_status fail(odm_status status, const char* message) {
  last_message = message;
  return status;
}

template <typename F>
odm_status guard(F&& body) {
  try {
    body();
    last_message.clear();
    return ODM_OK;
  } catch (const odmap::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(ODM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ODM_ERR_INTERNAL, e.what());
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) {
    throw odmap::Error(odmap::ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

template <typename Write>
void emit_csv(char** csv_out, Write&& write) {
  require(csv_out, "csv_out");
  std::ostringstream os;
  write(os);
  *csv_out = dup_string(os.str());
}

std::vector<std::string> split_ids(const char* text) {
  std::vector<std::string> ids;
  std::string cur;
  for (const char* p = text; *p; ++p) {
    if (*p == ';') {
      if (!cur.empty()) ids.push_back(cur);
      cur.clear();
    } else {
      cur += *p;
    }
  }
  if (!cur.empty()) ids.push_back(cur);
  if (ids.empty()) throw odmap::Error(odmap::ErrorCode::InvalidArgument, "no destination ids given");
  return ids;
}

odmap::MonthDay month_day_arg(const char* text, const char* what) {
  require(text, what);
  auto md = odmap::parse_month_day(text);
  if (!md) {
    throw odmap::Error(odmap::ErrorCode::InvalidArgument,
                       std::string("malformed ") + what + " '" + text + "' (expected MM-DD)");
  }
  return *md;
}

odmap::Date date_arg(const char* text) {
  if (text == nullptr) throw odmap::Error(odmap::ErrorCode::InvalidArgument, "date must not be NULL");
  auto d = odmap::parse_date(text);
  if (!d) {
    throw odmap::Error(odmap::ErrorCode::InvalidRange,
                       std::string("malformed date '") + text + "' (expected YYYY-MM-DD)");
  }
  return *d;
}

}  // namespace

extern "C" {

const char* odm_version(void) { return "1.0.0"; }

const char* odm_status_name(odm_status status) {
  switch (status) {
    case ODM_OK: return "ok";
    case ODM_ERR_INTERNAL: return "internal error";
    default: return odmap::error_code_name(static_cast<odmap::ErrorCode>(status));
  }
}

const char* odm_last_error_message(void) { return last_message.c_str(); }

void odm_string_free(char* str) { std::free(str); }

odm_status odm_day_index(int32_t year, const char* date, uint32_t* out) {
  return guard([&] {
    require(out, "out");
    const auto d = date_arg(date);
    auto t = odmap::day_index(d, year);
    if (!t) {
      throw odmap::Error(odmap::ErrorCode::InvalidRange,
                         std::string(date) + " is not in year " + std::to_string(year));
    }
    *out = *t;
  });
}

odm_status odm_date_range(int32_t year, const char* from, const char* to, uint32_t* start,
                          uint32_t* end) {
  return guard([&] {
    require(start, "start");
    require(end, "end");
    const auto r = odmap::date_range(year, date_arg(from), date_arg(to));
    *start = r.start;
    *end = r.end;
  });
}

odm_status odm_registry_load(const char* path, odm_registry** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new odm_registry{odmap::load_registry_csv(path)};
  });
}

void odm_registry_free(odm_registry* registry) { delete registry; }

size_t odm_registry_size(const odm_registry* registry) {
  return registry ? registry->impl.size() : 0;
}

odm_status odm_registry_index_of(const odm_registry* registry, const char* ic_id, uint32_t* out) {
  return guard([&] {
    require(registry, "registry");
    require(ic_id, "ic_id");
    require(out, "out");
    *out = registry->impl.require(ic_id);
  });
}

odm_status odm_build_from_csv(const odm_registry* registry, const char* log_path,
                              const odm_build_options* options, odm_tensor** unspecified_out,
                              odm_tensor** specified_out, odm_ingest_report* report) {
  return guard([&] {
    require(registry, "registry");
    require(log_path, "log_path");
    require(options, "options");
    require(unspecified_out, "unspecified_out");
    require(specified_out, "specified_out");
    odmap::IngestOptions opts;
    opts.year = options->year;
    opts.has_header = options->has_header != 0;
    opts.skip_malformed = options->skip_malformed != 0;
    opts.unknown_ic = options->skip_unknown_ic ? odmap::UnknownIcPolicy::Skip
                                               : odmap::UnknownIcPolicy::Error;
    opts.threads = options->threads;
    auto result = odmap::ingest_log_file(log_path, registry->impl, opts);
    if (report) {
      report->read = result.stats.read;
      report->accepted_unspecified = result.stats.accepted_unspecified;
      report->accepted_specified = result.stats.accepted_specified;
      report->out_of_year = result.stats.out_of_year;
      report->unknown_ic = result.stats.unknown_ic;
      report->malformed = result.stats.malformed;
    }
    auto* u = new odm_tensor{std::move(result.unspecified)};
    auto* s = new (std::nothrow) odm_tensor{std::move(result.specified)};
    if (!s) {
      delete u;
      throw std::bad_alloc();
    }
    *unspecified_out = u;
    *specified_out = s;
  });
}

odm_status odm_tensor_save(const odm_tensor* tensor, const char* path, uint64_t* bytes_written) {
  return guard([&] {
    require(tensor, "tensor");
    require(path, "path");
    const auto n = odmap::save(tensor->impl, path);
    if (bytes_written) *bytes_written = n;
  });
}

odm_status odm_tensor_load(const char* path, odm_tensor** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new odm_tensor{odmap::load(path)};
  });
}

void odm_tensor_free(odm_tensor* tensor) { delete tensor; }

odm_status odm_tensor_get_info(const odm_tensor* tensor, odm_tensor_info* out) {
  return guard([&] {
    require(tensor, "tensor");
    require(out, "out");
    const auto& t = tensor->impl;
    out->year = t.year();
    out->category = static_cast<odm_category>(t.category());
    out->n_ics = t.n_ics();
    out->n_days = t.n_days();
    out->nnz = t.nnz();
    out->total = t.total();
  });
}

odm_status odm_tensor_get(const odm_tensor* tensor, uint32_t origin, uint32_t destination,
                          uint32_t day, uint32_t* out) {
  return guard([&] {
    require(tensor, "tensor");
    require(out, "out");
    const auto& t = tensor->impl;
    if (origin >= t.n_ics() || destination >= t.n_ics() || day >= t.n_days()) {
      throw odmap::Error(odmap::ErrorCode::InvalidRange, "cell index out of range");
    }
    *out = t.at(origin, destination, day);
  });
}

odm_status odm_tensor_merge(const odm_tensor* a, const odm_tensor* b, odm_tensor** out) {
  return guard([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = new odm_tensor{odmap::merge(a->impl, b->impl)};
  });
}

odm_status odm_tensor_info_csv(const odm_tensor* tensor, char** csv_out) {
  return guard([&] {
    require(tensor, "tensor");
    const auto& t = tensor->impl;
    emit_csv(csv_out, [&](std::ostream& os) {
      os << "year,category,n_ics,n_days,nnz,total\n"
         << t.year() << ',' << odmap::category_name(t.category()) << ',' << t.n_ics() << ','
         << t.n_days() << ',' << t.nnz() << ',' << t.total() << '\n';
    });
  });
}

odm_status odm_query_sum_csv(const odm_tensor* tensor, const odm_registry* registry,
                             uint32_t start, uint32_t end, char** csv_out) {
  return guard([&] {
    require(tensor, "tensor");
    require(registry, "registry");
    odmap::check_registry(tensor->impl, registry->impl);
    const auto totals = odmap::aggregate_over_origin(tensor->impl, {start, end});
    emit_csv(csv_out, [&](std::ostream& os) {
      odmap::write_destination_totals_csv(os, totals, registry->impl);
    });
  });
}

odm_status odm_query_slice_csv(const odm_tensor* tensor, uint32_t start, uint32_t end,
                               char** csv_out) {
  return guard([&] {
    require(tensor, "tensor");
    const auto m = odmap::slice_time(tensor->impl, {start, end});
    emit_csv(csv_out, [&](std::ostream& os) { odmap::write_matrix_csv(os, m); });
  });
}

odm_status odm_query_topk_csv(const odm_tensor* tensor, const odm_registry* registry,
                              const char* dest_id, uint32_t start, uint32_t end, uint32_t k,
                              char** csv_out) {
  return guard([&] {
    require(tensor, "tensor");
    require(registry, "registry");
    require(dest_id, "dest_id");
    const auto ranked = odmap::top_k_origins(tensor->impl, dest_id, {start, end}, k, registry->impl);
    emit_csv(csv_out, [&](std::ostream& os) { odmap::write_top_k_csv(os, ranked); });
  });
}

odm_status odm_query_series_csv(const odm_tensor* tensor, const odm_registry* registry,
                                const char* dest_ids, uint32_t start, uint32_t end,
                                char** csv_out) {
  return guard([&] {
    require(tensor, "tensor");
    require(registry, "registry");
    require(dest_ids, "dest_ids");
    const auto ids = split_ids(dest_ids);
    const auto s = odmap::destination_series(tensor->impl, ids, {start, end}, registry->impl);
    emit_csv(csv_out, [&](std::ostream& os) { odmap::write_series_csv(os, s); });
  });
}

odm_status odm_trend_monthly_csv(const odm_tensor* tensor, char** csv_out) {
  return guard([&] {
    require(tensor, "tensor");
    const auto months = odmap::monthly_totals(tensor->impl);
    emit_csv(csv_out, [&](std::ostream& os) { odmap::write_monthly_csv(os, months); });
  });
}

odm_status odm_season_from_presets(const char* presets_path, const char* label, odm_season** out) {
  return guard([&] {
    require(presets_path, "presets_path");
    require(label, "label");
    require(out, "out");
    const auto presets = odmap::load_season_presets(presets_path);
    *out = new odm_season{odmap::find_preset(presets, label)};
  });
}

odm_status odm_season_create(const char* label, const char* start_mmdd, const char* end_mmdd,
                             const char* dest_ids, odm_season** out) {
  return guard([&] {
    require(label, "label");
    require(dest_ids, "dest_ids");
    require(out, "out");
    odmap::SeasonWindow w{label, month_day_arg(start_mmdd, "start"), month_day_arg(end_mmdd, "end"),
                          split_ids(dest_ids)};
    if (w.end < w.start) {
      throw odmap::Error(odmap::ErrorCode::InvalidArgument, "season window ends before it starts");
    }
    *out = new odm_season{std::move(w)};
  });
}

void odm_season_free(odm_season* season) { delete season; }

const char* odm_season_label(const odm_season* season) {
  return season ? season->impl.label.c_str() : "";
}

odm_status odm_trend_season_csv(const odm_tensor* tensor, const odm_registry* registry,
                                const odm_season* season, const char* holidays_path,
                                char** csv_out) {
  return guard([&] {
    require(tensor, "tensor");
    require(registry, "registry");
    require(season, "season");
    odmap::HolidayCalendar holidays;
    if (holidays_path) holidays = odmap::load_holidays(holidays_path);
    const int year = tensor->impl.year();
    const auto series = odmap::season_series(std::span<const odmap::OdTensor>(&tensor->impl, 1),
                                             season->impl, registry->impl,
                                             holidays_path ? &holidays : nullptr,
                                             tensor->impl.category(), std::span<const int>(&year, 1));
    emit_csv(csv_out, [&](std::ostream& os) { odmap::write_annotated_csv(os, series.front()); });
  });
}

odm_status odm_trend_peaks_csv(const odm_tensor* tensor, const odm_registry* registry,
                               const odm_season* season, uint32_t k, char** csv_out) {
  return guard([&] {
    require(tensor, "tensor");
    require(registry, "registry");
    require(season, "season");
    const auto& t = tensor->impl;
    const auto s = odmap::destination_series(t, season->impl.dest_ids,
                                             odmap::window_range(season->impl, t.year()),
                                             registry->impl);
    const auto peaks = odmap::peak_days(s, k);
    emit_csv(csv_out, [&](std::ostream& os) { odmap::write_peaks_csv(os, t.year(), peaks); });
  });
}

odm_status odm_trend_yoy_csv(const odm_tensor* const* tensors, size_t n_tensors,
                             const odm_registry* registry, const odm_season* season,
                             char** csv_out) {
  return guard([&] {
    require(tensors, "tensors");
    require(registry, "registry");
    require(season, "season");
    std::vector<odmap::DaySeries> series;
    for (size_t k = 0; k < n_tensors; ++k) {
      require(tensors[k], "tensor");
      const auto& t = tensors[k]->impl;
      series.push_back(odmap::destination_series(t, season->impl.dest_ids,
                                                 odmap::window_range(season->impl, t.year()),
                                                 registry->impl));
    }
    std::stable_sort(series.begin(), series.end(),
                     [](const auto& a, const auto& b) { return a.year < b.year; });
    const auto yoy = odmap::year_over_year(series);
    emit_csv(csv_out, [&](std::ostream& os) { odmap::write_yoy_csv(os, yoy); });
  });
}

void odm_generator_defaults(odm_generator_config* out) {
  if (!out) return;
  static const odmap::GeneratorConfig desk = odmap::GeneratorConfig::desk_scale();
  static const std::vector<int32_t> years(desk.years.begin(), desk.years.end());
  static const std::vector<std::string> dates = [] {
    std::vector<std::string> v;
    for (const auto& h : desk.hotspots) {
      v.push_back(odmap::format_month_day(h.season_start));
      v.push_back(odmap::format_month_day(h.season_end));
      v.push_back(h.peak ? odmap::format_month_day(*h.peak) : std::string());
    }
    return v;
  }();
  static const std::vector<odm_hotspot> hotspots = [] {
    std::vector<odm_hotspot> v;
    for (std::size_t k = 0; k < desk.hotspots.size(); ++k) {
      const auto& h = desk.hotspots[k];
      v.push_back({h.label.c_str(), h.destination, dates[3 * k].c_str(), dates[3 * k + 1].c_str(),
                   h.peak ? dates[3 * k + 2].c_str() : nullptr, h.peak_multiplier,
                   h.weekend_multiplier});
    }
    return v;
  }();
  out->seed = desk.seed;
  out->years = years.data();
  out->n_years = years.size();
  out->n_ics = desk.n_ics;
  out->base_rate = desk.base_rate;
  out->hotspots = hotspots.data();
  out->n_hotspots = hotspots.size();
  out->specified_fraction = desk.specified_fraction;
  out->yearly_growth = desk.yearly_growth;
  out->lookahead_days = desk.lookahead_days;
  out->popularity_exponent = desk.popularity_exponent;
}

odm_status odm_generate(const odm_generator_config* config, const char* out_dir,
                        odm_generate_report* report) {
  return guard([&] {
    require(config, "config");
    require(out_dir, "out_dir");
    odmap::GeneratorConfig c;
    c.seed = config->seed;
    if (config->n_years > 0) require(config->years, "years");
    c.years.assign(config->years, config->years + config->n_years);
    c.n_ics = config->n_ics;
    c.base_rate = config->base_rate;
    c.specified_fraction = config->specified_fraction;
    c.yearly_growth = config->yearly_growth;
    c.lookahead_days = config->lookahead_days;
    c.popularity_exponent = config->popularity_exponent;
    if (config->n_hotspots > 0) require(config->hotspots, "hotspots");
    for (size_t k = 0; k < config->n_hotspots; ++k) {
      const auto& h = config->hotspots[k];
      require(h.label, "hotspot label");
      odmap::Hotspot hs;
      hs.label = h.label;
      hs.destination = h.destination;
      hs.season_start = month_day_arg(h.season_start, "hotspot season start");
      hs.season_end = month_day_arg(h.season_end, "hotspot season end");
      if (h.peak) hs.peak = month_day_arg(h.peak, "hotspot peak");
      hs.peak_multiplier = h.peak_multiplier;
      hs.weekend_multiplier = h.weekend_multiplier;
      c.hotspots.push_back(std::move(hs));
    }
    const auto files = odmap::write_corpus(c, out_dir);
    if (report) {
      report->records = files.records;
      report->log_bytes = files.log_bytes;
    }
  });
}

}  // extern "C"
