/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of the odmap library: build Origin x Destination x Day search
 * count tensors from route-search logs, persist them, and query them.
 *
 * Every fallible call returns an odm_status. On failure the message of the
 * most recent error on the calling thread is available from
 * odm_last_error_message(). Objects are opaque handles released with their
 * matching *_free function. Strings returned through `char**` are owned by
 * the caller and released with odm_string_free().
 */

#ifndef ODMAP_ODMAP_H
#define ODMAP_ODMAP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ODMAP_BUILDING_LIBRARY)
#    define ODM_API __declspec(dllexport)
#  else
#    define ODM_API __declspec(dllimport)
#  endif
#else
#  define ODM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum odm_status {
  ODM_OK = 0,
  ODM_ERR_INVALID_ARGUMENT = 1,
  ODM_ERR_PARSE = 2,
  ODM_ERR_IO = 3,
  ODM_ERR_UNKNOWN_IC = 4,
  ODM_ERR_DUPLICATE_IC = 5,
  ODM_ERR_OVERFLOW = 6,
  ODM_ERR_BAD_MAGIC = 7,
  ODM_ERR_VERSION_MISMATCH = 8,
  ODM_ERR_TRUNCATED = 9,
  ODM_ERR_CHECKSUM = 10,
  ODM_ERR_CORRUPT = 11,
  ODM_ERR_MISMATCH = 12,
  ODM_ERR_INVALID_RANGE = 13,
  ODM_ERR_MISSING_YEAR = 14,
  ODM_ERR_INTERNAL = 99
} odm_status;

typedef enum odm_category {
  ODM_CATEGORY_UNSPECIFIED = 0,
  ODM_CATEGORY_SPECIFIED = 1
} odm_category;

typedef struct odm_registry odm_registry;
typedef struct odm_tensor odm_tensor;
typedef struct odm_season odm_season;

ODM_API const char* odm_version(void);
ODM_API const char* odm_status_name(odm_status status);
ODM_API const char* odm_last_error_message(void);
ODM_API void odm_string_free(char* str);

/* ---- calendar ---------------------------------------------------------- */

/* Day index of an inclusive `YYYY-MM-DD` date within `year` (January 1st is
 * 0). ODM_ERR_INVALID_RANGE if the date is malformed or in another year. */
ODM_API odm_status odm_day_index(int32_t year, const char* date, uint32_t* out);

/* Half-open day range covering the inclusive dates `from`..`to`. */
ODM_API odm_status odm_date_range(int32_t year, const char* from, const char* to,
                                  uint32_t* start, uint32_t* end);

/* ---- registry ---------------------------------------------------------- */

ODM_API odm_status odm_registry_load(const char* path, odm_registry** out);
ODM_API void odm_registry_free(odm_registry* registry);
ODM_API size_t odm_registry_size(const odm_registry* registry);
ODM_API odm_status odm_registry_index_of(const odm_registry* registry, const char* ic_id,
                                         uint32_t* out);

/* ---- build ------------------------------------------------------------- */

typedef struct odm_build_options {
  int32_t year;
  int has_header;      /* first log line is a header */
  int skip_unknown_ic; /* count and drop records with unknown ICs */
  int skip_malformed;  /* count and drop unparseable lines */
  uint32_t threads;    /* 0 or 1 = sequential */
} odm_build_options;

typedef struct odm_ingest_report {
  uint64_t read;
  uint64_t accepted_unspecified;
  uint64_t accepted_specified;
  uint64_t out_of_year;
  uint64_t unknown_ic;
  uint64_t malformed;
} odm_ingest_report;

/* One pass over a log CSV producing both category tensors. */
ODM_API odm_status odm_build_from_csv(const odm_registry* registry, const char* log_path,
                                      const odm_build_options* options,
                                      odm_tensor** unspecified_out, odm_tensor** specified_out,
                                      odm_ingest_report* report);

/* ---- tensors ----------------------------------------------------------- */

typedef struct odm_tensor_info {
  int32_t year;
  odm_category category;
  uint32_t n_ics;
  uint32_t n_days;
  uint64_t nnz;
  uint64_t total;
} odm_tensor_info;

ODM_API odm_status odm_tensor_save(const odm_tensor* tensor, const char* path,
                                   uint64_t* bytes_written);
ODM_API odm_status odm_tensor_load(const char* path, odm_tensor** out);
ODM_API void odm_tensor_free(odm_tensor* tensor);
ODM_API odm_status odm_tensor_get_info(const odm_tensor* tensor, odm_tensor_info* out);
ODM_API odm_status odm_tensor_get(const odm_tensor* tensor, uint32_t origin,
                                  uint32_t destination, uint32_t day, uint32_t* out);
ODM_API odm_status odm_tensor_merge(const odm_tensor* a, const odm_tensor* b, odm_tensor** out);
/* `year,category,n_ics,n_days,nnz,total` header and one row. */
ODM_API odm_status odm_tensor_info_csv(const odm_tensor* tensor, char** csv_out);

/* ---- queries (day ranges are half-open [start, end)) ------------------- */

/* dest_index,dest_ic,count */
ODM_API odm_status odm_query_sum_csv(const odm_tensor* tensor, const odm_registry* registry,
                                     uint32_t start, uint32_t end, char** csv_out);
/* i,j,count (nonzero cells) */
ODM_API odm_status odm_query_slice_csv(const odm_tensor* tensor, uint32_t start, uint32_t end,
                                       char** csv_out);
/* rank,origin_ic,count */
ODM_API odm_status odm_query_topk_csv(const odm_tensor* tensor, const odm_registry* registry,
                                      const char* dest_id, uint32_t start, uint32_t end,
                                      uint32_t k, char** csv_out);
/* day_index,date,count; dest_ids is semicolon-separated */
ODM_API odm_status odm_query_series_csv(const odm_tensor* tensor, const odm_registry* registry,
                                        const char* dest_ids, uint32_t start, uint32_t end,
                                        char** csv_out);

/* ---- trends ------------------------------------------------------------ */

/* month,count */
ODM_API odm_status odm_trend_monthly_csv(const odm_tensor* tensor, char** csv_out);

/* Season windows: from a presets CSV by label, or built from parts
 * ("MM-DD" endpoints, inclusive; semicolon-separated destination ids). */
ODM_API odm_status odm_season_from_presets(const char* presets_path, const char* label,
                                           odm_season** out);
ODM_API odm_status odm_season_create(const char* label, const char* start_mmdd,
                                     const char* end_mmdd, const char* dest_ids,
                                     odm_season** out);
ODM_API void odm_season_free(odm_season* season);
ODM_API const char* odm_season_label(const odm_season* season);

/* date,count,is_weekend,is_holiday for the tensor's year. holidays_path may
 * be NULL. */
ODM_API odm_status odm_trend_season_csv(const odm_tensor* tensor, const odm_registry* registry,
                                        const odm_season* season, const char* holidays_path,
                                        char** csv_out);
/* rank,day_index,date,count of the k highest days in the season window. */
ODM_API odm_status odm_trend_peaks_csv(const odm_tensor* tensor, const odm_registry* registry,
                                       const odm_season* season, uint32_t k, char** csv_out);
/* year,total,ratio across tensors (at least two, ascending year order). */
ODM_API odm_status odm_trend_yoy_csv(const odm_tensor* const* tensors, size_t n_tensors,
                                     const odm_registry* registry, const odm_season* season,
                                     char** csv_out);

/* ---- synthetic corpus -------------------------------------------------- */

typedef struct odm_hotspot {
  const char* label;
  uint32_t destination;     /* registry index */
  const char* season_start; /* "MM-DD" */
  const char* season_end;   /* "MM-DD", inclusive */
  const char* peak;         /* "MM-DD" or NULL for a flat season */
  double peak_multiplier;
  double weekend_multiplier;
} odm_hotspot;

typedef struct odm_generator_config {
  uint64_t seed;
  const int32_t* years;
  size_t n_years;
  uint32_t n_ics;
  double base_rate;
  const odm_hotspot* hotspots;
  size_t n_hotspots;
  double specified_fraction;
  double yearly_growth;
  uint32_t lookahead_days;
  double popularity_exponent;
} odm_generator_config;

/* Fills `out` with the desk-scale defaults. Pointer members reference
 * static storage owned by the library. */
ODM_API void odm_generator_defaults(odm_generator_config* out);

typedef struct odm_generate_report {
  uint64_t records;
  uint64_t log_bytes;
} odm_generate_report;

/* Writes registry.csv, logs.csv, ground_truth_<year>.csv, planted_peaks.csv
 * and season_presets.csv into out_dir. */
ODM_API odm_status odm_generate(const odm_generator_config* config, const char* out_dir,
                                odm_generate_report* report);

#ifdef __cplusplus
}
#endif

#endif /* ODMAP_ODMAP_H */
