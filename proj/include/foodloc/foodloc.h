/*
 * Copyright 2026 The foodloc Authors.
 *
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
#ifndef FOODLOC_FOODLOC_H
#define FOODLOC_FOODLOC_H

/*
 * C interface to the foodloc facility-placement library.
 *
 * Objects are opaque handles created by fl_*_load / fl_*_build style calls
 * and released with the matching fl_*_free. Every fallible call returns an
 * fl_status; on failure fl_last_error() describes the problem for the
 * calling thread until its next failing call. Pointers returned by
 * accessors stay valid for the lifetime of the owning handle.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define FL_API __declspec(dllexport)
#else
#  define FL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define FOODLOC_VERSION_MAJOR 1
#define FOODLOC_VERSION_MINOR 0
#define FOODLOC_VERSION_PATCH 0
#define FOODLOC_VERSION                                        \
  ((FOODLOC_VERSION_MAJOR << 16) | (FOODLOC_VERSION_MINOR << 8) | \
   FOODLOC_VERSION_PATCH)

typedef enum fl_status {
  FL_OK = 0,
  FL_ERR_INVALID_ARGUMENT = 1,
  FL_ERR_INGEST = 2,
  FL_ERR_DISTANCE = 3,
  FL_ERR_SOLVE = 4,
  FL_ERR_EVALUATE = 5,
  FL_ERR_FORMAT = 6,
  FL_ERR_IO = 7,
  FL_ERR_INTERNAL = 8
} fl_status;

FL_API unsigned fl_version(void);
FL_API const char* fl_last_error(void);
FL_API const char* fl_status_name(fl_status status);

/* CRC-32 (ISO-HDLC, as in zlib). */
FL_API uint32_t fl_crc32(const void* data, size_t size);

typedef struct fl_point {
  double lat;
  double lon;
} fl_point;

/* ---------------------------------------------------------------- ingest */

typedef struct fl_households fl_households;

/* Column names; NULL or "" means "not present". lat/lon default to "lat"
 * and "lon". */
typedef struct fl_csv_schema {
  const char* id_column;
  const char* lat_column;
  const char* lon_column;
  const char* income_column;
  const char* weight_column;
  const char* origin_column;
  const char* city_column;
} fl_csv_schema;

typedef enum fl_weighting {
  FL_WEIGHTING_NONE = 0,
  FL_WEIGHTING_DUPLICATE = 1,
  FL_WEIGHTING_DIRECT = 2
} fl_weighting;

typedef struct fl_ingest_config {
  double income_cap;       /* dollars/year, default 40000 */
  uint64_t sample_size;    /* 0 means all */
  uint64_t seed;
  fl_weighting weighting_mode;
  double weight_numerator; /* default 5 */
  double weight_cap;       /* default 50 */
} fl_ingest_config;

typedef struct fl_household_view {
  const char* id;
  fl_point location;
  int has_income;
  double income;
  double weight;
  const char* origin_id;
  const char* city; /* NULL when untagged */
} fl_household_view;

FL_API void fl_ingest_config_init(fl_ingest_config* config);

/* schema NULL reads the prepared-household layout written by
 * fl_households_save_csv. */
FL_API fl_status fl_households_load_csv(const char* path,
                                        const fl_csv_schema* schema,
                                        fl_households** out);
FL_API fl_status fl_households_save_csv(const fl_households* households,
                                        const char* path);
FL_API fl_status fl_households_prepare(const fl_households* households,
                                       const fl_ingest_config* config,
                                       fl_households** out);
FL_API fl_status fl_households_filter_by_income(const fl_households* households,
                                                double cap, fl_households** out);
FL_API fl_status fl_households_sample(const fl_households* households, size_t n,
                                      uint64_t seed, fl_households** out);
FL_API fl_status fl_households_apply_weights(const fl_households* households,
                                             double numerator, double weight_cap,
                                             fl_households** out);
FL_API fl_status fl_households_duplicate(const fl_households* households,
                                         fl_households** out);
FL_API fl_status fl_compute_weight(double income, double numerator,
                                   double weight_cap, double* out);
FL_API size_t fl_households_count(const fl_households* households);
FL_API fl_status fl_households_get(const fl_households* households, size_t index,
                                   fl_household_view* out);
FL_API void fl_households_free(fl_households* households);

typedef struct fl_synth_params {
  size_t clusters;
  size_t points_per_cluster;
  double spread_km;
  const fl_point* centers; /* NULL: drawn inside the bounding box */
  size_t center_count;
  double min_lat, max_lat, min_lon, max_lon;
  double income_log_mean;
  double income_log_sd;
  uint64_t seed;
} fl_synth_params;

FL_API void fl_synth_params_init(fl_synth_params* params);
FL_API fl_status fl_synth_generate(const fl_synth_params* params,
                                   fl_households** out);

/* -------------------------------------------------------------- distance */

typedef enum fl_provider_kind {
  FL_PROVIDER_GREAT_CIRCLE = 0,
  FL_PROVIDER_TABLE_API = 1
} fl_provider_kind;

typedef struct fl_provider_spec {
  fl_provider_kind kind;
  const char* base_url;    /* table API root, e.g. "http://localhost:5000" */
  const char* profile;     /* default "driving" */
  size_t chunk_size;       /* coordinates per request, >= 2, default 100 */
  double earth_radius;     /* meters, default 6371000 */
  size_t max_in_flight;    /* concurrent requests, default 4 */
  int max_attempts;        /* transport retries, default 3 */
  double retry_base_delay; /* seconds, default 0.5 */
  const char* replay_file; /* recorded responses instead of HTTP */
} fl_provider_spec;

typedef struct fl_matrix fl_matrix;

FL_API void fl_provider_spec_init(fl_provider_spec* spec);
FL_API double fl_great_circle(fl_point a, fl_point b, double earth_radius);

FL_API fl_status fl_matrix_build(const fl_provider_spec* spec,
                                 const fl_point* sources, size_t source_count,
                                 const fl_point* destinations,
                                 size_t destination_count, fl_matrix** out);
/* Square household x household matrix. */
FL_API fl_status fl_matrix_build_households(const fl_provider_spec* spec,
                                            const fl_households* households,
                                            fl_matrix** out);
FL_API fl_status fl_matrix_from_values(size_t n, const double* values,
                                       fl_matrix** out);
FL_API fl_status fl_matrix_save(const fl_matrix* matrix, const char* path);
FL_API fl_status fl_matrix_load(const char* path, fl_matrix** out);
/* 1 when the matrix was built by this provider over exactly these
 * households, else 0. */
FL_API int fl_matrix_matches(const fl_matrix* matrix,
                             const fl_households* households,
                             const fl_provider_spec* spec);
FL_API size_t fl_matrix_rows(const fl_matrix* matrix);
FL_API size_t fl_matrix_cols(const fl_matrix* matrix);
FL_API const double* fl_matrix_data(const fl_matrix* matrix);
FL_API const char* fl_matrix_provider_tag(const fl_matrix* matrix);
FL_API const char* fl_matrix_created_at(const fl_matrix* matrix);
FL_API void fl_matrix_free(fl_matrix* matrix);

/* -------------------------------------------------------------- kmedoids */

typedef enum fl_solve_mode {
  FL_SOLVE_GLOBAL_SWAP = 0,
  FL_SOLVE_PAPER_LITERAL = 1
} fl_solve_mode;

typedef void (*fl_trace_fn)(void* user, size_t pass, size_t out_index,
                            size_t in_index, double objective);

typedef struct fl_solve_params {
  size_t k;
  fl_solve_mode mode;
  uint64_t seed;
  double epsilon;    /* meters, default 1e-6 */
  size_t max_passes; /* 0 means unlimited */
  fl_trace_fn trace; /* optional, called per accepted swap */
  void* trace_user;
} fl_solve_params;

typedef struct fl_clustering fl_clustering;

FL_API void fl_solve_params_init(fl_solve_params* params);
/* weights may be NULL for unit weights. When max_passes runs out the call
 * returns FL_ERR_SOLVE and still stores the best clustering in *out. */
FL_API fl_status fl_solve(const fl_matrix* matrix, const fl_solve_params* params,
                          const double* weights, fl_clustering** out);
FL_API fl_status fl_brute_force_solve(const fl_matrix* matrix, size_t k,
                                      const double* weights,
                                      fl_clustering** out);
FL_API size_t fl_clustering_k(const fl_clustering* clustering);
FL_API const size_t* fl_clustering_medoids(const fl_clustering* clustering);
FL_API size_t fl_clustering_point_count(const fl_clustering* clustering);
FL_API const size_t* fl_clustering_assignment(const fl_clustering* clustering);
FL_API double fl_clustering_objective(const fl_clustering* clustering);
FL_API size_t fl_clustering_passes(const fl_clustering* clustering);
FL_API void fl_clustering_free(fl_clustering* clustering);

/* ------------------------------------------------------------- hierarchy */

typedef struct fl_hierarchy_params {
  size_t k_banks;
  size_t k_pantries_total;
  fl_solve_params bank_solver;   /* k is ignored */
  fl_solve_params pantry_solver; /* k is ignored */
} fl_hierarchy_params;

typedef struct fl_plan fl_plan;

FL_API void fl_hierarchy_params_init(fl_hierarchy_params* params);
FL_API fl_status fl_allocate_pantry_counts(const size_t* cluster_sizes,
                                           size_t cluster_count, size_t total,
                                           size_t* out_counts);
FL_API fl_status fl_place_two_level(const fl_matrix* matrix,
                                    const fl_hierarchy_params* params,
                                    const double* weights, fl_plan** out);
FL_API size_t fl_plan_bank_count(const fl_plan* plan);
FL_API const size_t* fl_plan_banks(const fl_plan* plan);
FL_API size_t fl_plan_pantry_count(const fl_plan* plan);
FL_API const size_t* fl_plan_pantries(const fl_plan* plan);
FL_API const size_t* fl_plan_pantry_to_bank(const fl_plan* plan);
FL_API size_t fl_plan_household_count(const fl_plan* plan);
FL_API const size_t* fl_plan_household_to_pantry(const fl_plan* plan);
FL_API double fl_plan_level1_objective(const fl_plan* plan);
FL_API double fl_plan_level2_objective(const fl_plan* plan);
/* out_per_pantry may be NULL; otherwise it must hold pantry_count values. */
FL_API fl_status fl_plan_bank_distances(const fl_plan* plan,
                                        const fl_matrix* matrix,
                                        double* out_per_pantry,
                                        double* out_total, double* out_mean);
/* metadata_json: a JSON object embedded in the file, or NULL. */
FL_API fl_status fl_plan_write_json(const fl_plan* plan,
                                    const fl_households* households,
                                    const char* metadata_json,
                                    const char* path);
FL_API fl_status fl_plan_write_geojson(const fl_plan* plan,
                                       const fl_households* households,
                                       const char* metadata_json,
                                       const char* path);
FL_API fl_status fl_plan_read_json(const char* path, fl_plan** out);
FL_API void fl_plan_free(fl_plan* plan);

/* -------------------------------------------------------------- evaluate */

typedef struct fl_facilities fl_facilities;
typedef struct fl_report fl_report;

typedef struct fl_city_box {
  const char* name;
  double min_lat, max_lat, min_lon, max_lon;
} fl_city_box;

typedef struct fl_group_stats {
  const char* group;
  size_t household_count;
  double total_weight;
  double candidate_avg_mi;
  double baseline_avg_mi;
  double saving_abs_mi;
  int has_saving_pct;
  double saving_pct;
  double candidate_total_mi;
  double baseline_total_mi;
} fl_group_stats;

typedef struct fl_penalty {
  size_t candidate_pantries;
  size_t baseline_pantries;
  double candidate_avg_mi;
  double baseline_avg_mi;
  double candidate_total_mi;
  double baseline_total_mi;
  double per_pantry_avg_mi;
  double total_mi;
} fl_penalty;

FL_API fl_status fl_facilities_load_csv(const char* path, const char* label,
                                        fl_facilities** out);
FL_API fl_status fl_facilities_from_points(const fl_point* points, size_t count,
                                           const char* label,
                                           fl_facilities** out);
FL_API fl_status fl_facilities_plan_pantries(const fl_plan* plan,
                                             const fl_households* households,
                                             const char* label,
                                             fl_facilities** out);
FL_API fl_status fl_facilities_plan_banks(const fl_plan* plan,
                                          const fl_households* households,
                                          const char* label,
                                          fl_facilities** out);
FL_API size_t fl_facilities_count(const fl_facilities* facilities);
FL_API void fl_facilities_free(fl_facilities* facilities);

FL_API fl_status fl_compare(const fl_facilities* candidate,
                            const fl_facilities* baseline,
                            const fl_households* households,
                            const fl_provider_spec* spec,
                            const fl_city_box* boxes, size_t box_count,
                            int use_weights, fl_report** out);
/* Households x facilities matrices; weights may be NULL. */
FL_API fl_status fl_compare_matrices(const fl_matrix* to_candidate,
                                     const fl_matrix* to_baseline,
                                     const double* weights, fl_report** out);
FL_API fl_status fl_report_add_penalty(fl_report* report, const fl_plan* plan,
                                       const fl_households* households,
                                       const fl_facilities* baseline_banks,
                                       const fl_facilities* baseline_pantries,
                                       const fl_provider_spec* spec);
/* Penalty from candidate per-pantry bank distances (meters) and a baseline
 * pantries x banks matrix. */
FL_API fl_status fl_penalty_from(const double* candidate_meters, size_t count,
                                 const fl_matrix* baseline_pantry_to_bank,
                                 fl_penalty* out);
FL_API size_t fl_report_group_count(const fl_report* report);
FL_API fl_status fl_report_group(const fl_report* report, size_t index,
                                 fl_group_stats* out);
/* Returns 1 and fills *out when the report carries a penalty block. */
FL_API int fl_report_penalty(const fl_report* report, fl_penalty* out);
FL_API fl_status fl_report_write_json(const fl_report* report,
                                      const char* metadata_json,
                                      const char* path);
FL_API fl_status fl_report_write_csv(const fl_report* report, const char* path);
FL_API fl_status fl_report_write_households_geojson(
    const fl_report* report, const fl_households* households,
    const char* metadata_json, const char* path);
FL_API void fl_report_free(fl_report* report);

#ifdef __cplusplus
}
#endif

#endif /* FOODLOC_FOODLOC_H */
