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
#include "foodloc/foodloc.h"

#include <cstring>
#include <filesystem>
#include <exception>
#include <new>
#include <string>

#include <json.hpp>
#include <zlib.h>

#include "foodloc/distance.hpp"
#include "foodloc/error.hpp"
#include "foodloc/evaluate.hpp"
#include "foodloc/hierarchy.hpp"
#include "foodloc/ingest.hpp"
#include "foodloc/io.hpp"
#include "foodloc/kmedoids.hpp"
#include "foodloc/synth.hpp"

struct fl_households final {
  std::vector<foodloc::ingest::Household> items;
};

struct fl_matrix final {
  foodloc::distance::DistanceMatrix matrix;
};

struct fl_clustering final {
  foodloc::kmedoids::Clustering clustering;
};

struct fl_plan final {
  foodloc::hierarchy::PlacementPlan plan;
};

struct fl_facilities final {
  foodloc::evaluate::FacilitySet set;
};

struct fl_report final {
  foodloc::evaluate::EvaluationReport report;
  std::vector<double> candidate_meters;
  std::vector<double> baseline_meters;
};

namespace {

using namespace foodloc;

thread_local std::string last_error;

fl_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return FL_ERR_INVALID_ARGUMENT;
    case ErrorKind::Ingest: return FL_ERR_INGEST;
    case ErrorKind::Distance: return FL_ERR_DISTANCE;
    case ErrorKind::Solve: return FL_ERR_SOLVE;
    case ErrorKind::Evaluate: return FL_ERR_EVALUATE;
    case ErrorKind::Format: return FL_ERR_FORMAT;
    case ErrorKind::Io: return FL_ERR_IO;
  }
  return FL_ERR_INTERNAL;
}

fl_status fail(fl_status status, const char* message) {
  last_error = message;
  return status;
}

template <class F>
fl_status try_(F&& f) {
  try {
    f();
    return FL_OK;
  } catch (const Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(FL_ERR_FORMAT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FL_ERR_INTERNAL, "unknown error");
  }
}

template <class T>
const T& deref(const T* p, const char* what) {
  if (!p) throw Error(ErrorKind::InvalidArgument, std::string(what) + " must not be null");
  return *p;
}

template <class T>
T& deref_out(T* p, const char* what) {
  if (!p) throw Error(ErrorKind::InvalidArgument, std::string(what) + " must not be null");
  return *p;
}

std::filesystem::path path_arg(const char* p) {
  if (!p || !*p) throw Error(ErrorKind::InvalidArgument, "path must not be empty");
  return p;
}

std::string str(const char* s) { return s ? std::string(s) : std::string(); }

std::string str_or(const char* s, const char* fallback) {
  return s && *s ? std::string(s) : std::string(fallback);
}

nlohmann::json metadata(const char* text) {
  if (!text || !*text) return nlohmann::json::object();
  auto doc = nlohmann::json::parse(text);
  if (!doc.is_object()) {
    throw Error(ErrorKind::InvalidArgument, "metadata must be a JSON object");
  }
  return doc;
}

std::vector<GeoPoint> points(const fl_point* p, std::size_t n) {
  if (n && !p) throw Error(ErrorKind::InvalidArgument, "points must not be null");
  std::vector<GeoPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back({p[i].lat, p[i].lon});
  return out;
}

distance::ProviderSpec provider(const fl_provider_spec* c) {
  const auto& s = deref(c, "provider spec");
  distance::ProviderSpec spec;
  spec.kind = s.kind == FL_PROVIDER_TABLE_API ? distance::ProviderKind::TableApi
                                              : distance::ProviderKind::GreatCircle;
  spec.base_url = str(s.base_url);
  spec.profile = str_or(s.profile, "driving");
  spec.chunk_size = s.chunk_size;
  spec.earth_radius = s.earth_radius;
  spec.max_in_flight = s.max_in_flight;
  spec.max_attempts = s.max_attempts;
  spec.retry_base_delay = s.retry_base_delay;
  spec.replay_file = str(s.replay_file);
  return spec;
}

kmedoids::SolveParams solve_params(const fl_solve_params& p) {
  kmedoids::SolveParams out;
  out.k = p.k;
  out.mode = p.mode == FL_SOLVE_PAPER_LITERAL ? kmedoids::SolveMode::PaperLiteral
                                              : kmedoids::SolveMode::GlobalSwap;
  out.seed = p.seed;
  out.epsilon = p.epsilon;
  if (p.max_passes) out.max_passes = p.max_passes;
  if (p.trace) {
    out.trace = [fn = p.trace, user = p.trace_user](const kmedoids::SwapEvent& e) {
      fn(user, e.pass, e.out_index, e.in_index, e.objective);
    };
  }
  return out;
}

std::span<const double> weight_span(const double* w, std::size_t n) {
  return w ? std::span<const double>(w, n) : std::span<const double>();
}

}  // namespace

extern "C" {

unsigned fl_version(void) { return FOODLOC_VERSION; }

const char* fl_last_error(void) { return last_error.c_str(); }

const char* fl_status_name(fl_status status) {
  switch (status) {
    case FL_OK: return "ok";
    case FL_ERR_INVALID_ARGUMENT: return "invalid argument";
    case FL_ERR_INGEST: return "ingest error";
    case FL_ERR_DISTANCE: return "distance error";
    case FL_ERR_SOLVE: return "solve error";
    case FL_ERR_EVALUATE: return "evaluate error";
    case FL_ERR_FORMAT: return "format error";
    case FL_ERR_IO: return "i/o error";
    case FL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

uint32_t fl_crc32(const void* data, size_t size) {
  return static_cast<uint32_t>(
      crc32(0L, static_cast<const Bytef*>(data), static_cast<uInt>(size)));
}

/* ingest */

void fl_ingest_config_init(fl_ingest_config* config) {
  if (!config) return;
  const ingest::IngestConfig d;
  *config = fl_ingest_config{d.income_cap, 0, d.seed, FL_WEIGHTING_NONE,
                             d.weight_numerator, d.weight_cap};
}

fl_status fl_households_load_csv(const char* path, const fl_csv_schema* schema,
                                 fl_households** out) {
  return try_([&] {
    auto& o = deref_out(out, "out");
    ingest::CsvSchema s = ingest::prepared_schema();
    if (schema) {
      s = ingest::CsvSchema{str(schema->id_column),
                            str_or(schema->lat_column, "lat"),
                            str_or(schema->lon_column, "lon"),
                            str(schema->income_column),
                            str(schema->weight_column),
                            str(schema->origin_column),
                            str(schema->city_column)};
    }
    o = new fl_households{ingest::load_households(path_arg(path), s)};
  });
}

fl_status fl_households_save_csv(const fl_households* households,
                                 const char* path) {
  return try_([&] {
    ingest::save_households(path_arg(path),
                            deref(households, "households").items);
  });
}

fl_status fl_households_prepare(const fl_households* households,
                                const fl_ingest_config* config,
                                fl_households** out) {
  return try_([&] {
    auto& o = deref_out(out, "out");
    const auto& c = deref(config, "config");
    ingest::IngestConfig cfg;
    cfg.income_cap = c.income_cap;
    if (c.sample_size) cfg.sample_size = c.sample_size;
    cfg.seed = c.seed;
    cfg.weighting_mode = c.weighting_mode == FL_WEIGHTING_DUPLICATE
                             ? ingest::WeightingMode::Duplicate
                         : c.weighting_mode == FL_WEIGHTING_DIRECT
                             ? ingest::WeightingMode::Direct
                             : ingest::WeightingMode::None;
    cfg.weight_numerator = c.weight_numerator;
    cfg.weight_cap = c.weight_cap;
    o = new fl_households{
        ingest::prepare(deref(households, "households").items, cfg)};
  });
}

fl_status fl_households_filter_by_income(const fl_households* households,
                                         double cap, fl_households** out) {
  return try_([&] {
    auto& o = deref_out(out, "out");
    o = new fl_households{
        ingest::filter_by_income(deref(households, "households").items, cap)};
  });
}

fl_status fl_households_sample(const fl_households* households, size_t n,
                               uint64_t seed, fl_households** out) {
  return try_([&] {
    auto& o = deref_out(out, "out");
    o = new fl_households{
        ingest::sample(deref(households, "households").items, n, seed)};
  });
}

fl_status fl_households_apply_weights(const fl_households* households,
                                      double numerator, double weight_cap,
                                      fl_households** out) {
  return try_([&] {
    auto& o = deref_out(out, "out");
    o = new fl_households{ingest::apply_income_weights(
        deref(households, "households").items, numerator, weight_cap)};
  });
}

fl_status fl_households_duplicate(const fl_households* households,
                                  fl_households** out) {
  return try_([&] {
    auto& o = deref_out(out, "out");
    o = new fl_households{
        ingest::duplicate_by_weight(deref(households, "households").items)};
  });
}

fl_status fl_compute_weight(double income, double numerator, double weight_cap,
                            double* out) {
  return try_([&] {
    deref_out(out, "out") = ingest::compute_weight(income, numerator, weight_cap);
  });
}

size_t fl_households_count(const fl_households* households) {
  return households ? households->items.size() : 0;
}

fl_status fl_households_get(const fl_households* households, size_t index,
                            fl_household_view* out) {
  return try_([&] {
    const auto& items = deref(households, "households").items;
    auto& o = deref_out(out, "out");
    if (index >= items.size()) {
      throw Error(ErrorKind::InvalidArgument, "household index out of range");
    }
    const auto& h = items[index];
    o.id = h.id.c_str();
    o.location = fl_point{h.location.lat, h.location.lon};
    o.has_income = h.income.has_value();
    o.income = h.income.value_or(0.0);
    o.weight = h.weight;
    o.origin_id = h.origin_id.c_str();
    o.city = h.city ? h.city->c_str() : nullptr;
  });
}

void fl_households_free(fl_households* households) { delete households; }

void fl_synth_params_init(fl_synth_params* params) {
  if (!params) return;
  const synth::SynthParams d;
  *params = fl_synth_params{d.clusters, d.points_per_cluster, d.spread_km,
                            nullptr, 0, d.min_lat, d.max_lat, d.min_lon,
                            d.max_lon, d.income_log_mean, d.income_log_sd,
                            d.seed};
}

fl_status fl_synth_generate(const fl_synth_params* params, fl_households** out) {
  return try_([&] {
    auto& o = deref_out(out, "out");
    const auto& p = deref(params, "params");
    synth::SynthParams s;
    s.clusters = p.clusters;
    s.points_per_cluster = p.points_per_cluster;
    s.spread_km = p.spread_km;
    s.centers = points(p.centers, p.centers ? p.center_count : 0);
    s.min_lat = p.min_lat;
    s.max_lat = p.max_lat;
    s.min_lon = p.min_lon;
    s.max_lon = p.max_lon;
    s.income_log_mean = p.income_log_mean;
    s.income_log_sd = p.income_log_sd;
    s.seed = p.seed;
    o = new fl_households{synth::generate(s)};
  });
}

/* distance */

void fl_provider_spec_init(fl_provider_spec* spec) {
  if (!spec) return;
  const distance::ProviderSpec d;
  *spec = fl_provider_spec{FL_PROVIDER_GREAT_CIRCLE, nullptr, nullptr,
                           d.chunk_size, d.earth_radius, d.max_in_flight,
                           d.max_attempts, d.retry_base_delay, nullptr};
}

double fl_great_circle(fl_point a, fl_point b, double earth_radius) {
  return great_circle({a.lat, a.lon}, {b.lat, b.lon}, earth_radius);
}

fl_status fl_matrix_build(const fl_provider_spec* spec, const fl_point* sources,
                          size_t source_count, const fl_point* destinations,
                          size_t destination_count, fl_matrix** out) {
  return try_([&] {
    auto& o = deref_out(out, "out");
    const auto src = points(sources, source_count);
    const auto dst = points(destinations, destination_count);
    o = new fl_matrix{distance::build_matrix(provider(spec), src, dst)};
  });
}

fl_status fl_matrix_build_households(const fl_provider_spec* spec,
                                     const fl_households* households,
                                     fl_matrix** out) {
  return try_([&] {
    auto& o = deref_out(out, "out");
    const auto pts = ingest::locations(deref(households, "households").items);
    o = new fl_matrix{distance::build_matrix(provider(spec), pts, pts)};
  });
}

fl_status fl_matrix_from_values(size_t n, const double* values, fl_matrix** out) {
  return try_([&] {
    auto& o = deref_out(out, "out");
    if (n && !values) throw Error(ErrorKind::InvalidArgument, "values must not be null");
    o = new fl_matrix{distance::DistanceMatrix::from_values(
        n, std::vector<double>(values, values + n * n))};
  });
}

fl_status fl_matrix_save(const fl_matrix* matrix, const char* path) {
  return try_([&] {
    distance::save_matrix(deref(matrix, "matrix").matrix, path_arg(path));
  });
}

fl_status fl_matrix_load(const char* path, fl_matrix** out) {
  return try_([&] {
    auto& o = deref_out(out, "out");
    o = new fl_matrix{distance::load_matrix(path_arg(path))};
  });
}

int fl_matrix_matches(const fl_matrix* matrix, const fl_households* households,
                      const fl_provider_spec* spec) {
  if (!matrix || !households || !spec) return 0;
  try {
    const auto pts = ingest::locations(households->items);
    const auto& m = matrix->matrix;
    return m.sources() == pts && m.destinations() == pts &&
           m.provider_tag() == distance::provider_tag(provider(spec));
  } catch (...) {
    return 0;
  }
}

size_t fl_matrix_rows(const fl_matrix* m) { return m ? m->matrix.rows() : 0; }
size_t fl_matrix_cols(const fl_matrix* m) { return m ? m->matrix.cols() : 0; }
const double* fl_matrix_data(const fl_matrix* m) {
  return m ? m->matrix.values().data() : nullptr;
}
const char* fl_matrix_provider_tag(const fl_matrix* m) {
  return m ? m->matrix.provider_tag().c_str() : nullptr;
}
const char* fl_matrix_created_at(const fl_matrix* m) {
  return m ? m->matrix.created_at().c_str() : nullptr;
}
void fl_matrix_free(fl_matrix* matrix) { delete matrix; }

/* kmedoids */

void fl_solve_params_init(fl_solve_params* params) {
  if (!params) return;
  const kmedoids::SolveParams d;
  *params = fl_solve_params{d.k, FL_SOLVE_GLOBAL_SWAP, d.seed, d.epsilon, 0,
                            nullptr, nullptr};
}

fl_status fl_solve(const fl_matrix* matrix, const fl_solve_params* params,
                   const double* weights, fl_clustering** out) {
  if (!out) return fail(FL_ERR_INVALID_ARGUMENT, "out must not be null");
  auto& o = *out;
  o = nullptr;
  return try_([&] {
    const auto& m = deref(matrix, "matrix").matrix;
    auto p = solve_params(deref(params, "params"));
    if (weights) p.weights.assign(weights, weights + m.rows());
    try {
      o = new fl_clustering{kmedoids::solve(m, p)};
    } catch (const kmedoids::MaxPassesExceeded& e) {
      o = new fl_clustering{e.best()};
      throw;
    }
  });
}

fl_status fl_brute_force_solve(const fl_matrix* matrix, size_t k,
                               const double* weights, fl_clustering** out) {
  return try_([&] {
    auto& o = deref_out(out, "out");
    const auto& m = deref(matrix, "matrix").matrix;
    o = new fl_clustering{
        kmedoids::brute_force_solve(m, k, weight_span(weights, m.rows()))};
  });
}

size_t fl_clustering_k(const fl_clustering* c) {
  return c ? c->clustering.medoids.size() : 0;
}
const size_t* fl_clustering_medoids(const fl_clustering* c) {
  return c ? c->clustering.medoids.data() : nullptr;
}
size_t fl_clustering_point_count(const fl_clustering* c) {
  return c ? c->clustering.assignment.size() : 0;
}
const size_t* fl_clustering_assignment(const fl_clustering* c) {
  return c ? c->clustering.assignment.data() : nullptr;
}
double fl_clustering_objective(const fl_clustering* c) {
  return c ? c->clustering.objective : 0.0;
}
size_t fl_clustering_passes(const fl_clustering* c) {
  return c ? c->clustering.passes : 0;
}
void fl_clustering_free(fl_clustering* clustering) { delete clustering; }

/* hierarchy */

void fl_hierarchy_params_init(fl_hierarchy_params* params) {
  if (!params) return;
  params->k_banks = 1;
  params->k_pantries_total = 1;
  fl_solve_params_init(&params->bank_solver);
  fl_solve_params_init(&params->pantry_solver);
}

fl_status fl_allocate_pantry_counts(const size_t* cluster_sizes,
                                    size_t cluster_count, size_t total,
                                    size_t* out_counts) {
  return try_([&] {
    if (cluster_count && (!cluster_sizes || !out_counts)) {
      throw Error(ErrorKind::InvalidArgument, "arrays must not be null");
    }
    const auto counts = hierarchy::allocate_pantry_counts(
        std::span<const std::size_t>(cluster_sizes, cluster_count), total);
    std::copy(counts.begin(), counts.end(), out_counts);
  });
}

fl_status fl_place_two_level(const fl_matrix* matrix,
                             const fl_hierarchy_params* params,
                             const double* weights, fl_plan** out) {
  return try_([&] {
    auto& o = deref_out(out, "out");
    const auto& m = deref(matrix, "matrix").matrix;
    const auto& p = deref(params, "params");
    hierarchy::HierarchyParams hp;
    hp.k_banks = p.k_banks;
    hp.k_pantries_total = p.k_pantries_total;
    hp.bank_solver = solve_params(p.bank_solver);
    hp.pantry_solver = solve_params(p.pantry_solver);
    o = new fl_plan{
        hierarchy::place_two_level(m, hp, weight_span(weights, m.rows()))};
  });
}

size_t fl_plan_bank_count(const fl_plan* p) { return p ? p->plan.banks.size() : 0; }
const size_t* fl_plan_banks(const fl_plan* p) { return p ? p->plan.banks.data() : nullptr; }
size_t fl_plan_pantry_count(const fl_plan* p) { return p ? p->plan.pantries.size() : 0; }
const size_t* fl_plan_pantries(const fl_plan* p) {
  return p ? p->plan.pantries.data() : nullptr;
}
const size_t* fl_plan_pantry_to_bank(const fl_plan* p) {
  return p ? p->plan.pantry_to_bank.data() : nullptr;
}
size_t fl_plan_household_count(const fl_plan* p) {
  return p ? p->plan.household_to_pantry.size() : 0;
}
const size_t* fl_plan_household_to_pantry(const fl_plan* p) {
  return p ? p->plan.household_to_pantry.data() : nullptr;
}
double fl_plan_level1_objective(const fl_plan* p) {
  return p ? p->plan.level1_objective : 0.0;
}
double fl_plan_level2_objective(const fl_plan* p) {
  return p ? p->plan.level2_objective : 0.0;
}

fl_status fl_plan_bank_distances(const fl_plan* plan, const fl_matrix* matrix,
                                 double* out_per_pantry, double* out_total,
                                 double* out_mean) {
  return try_([&] {
    const auto d = hierarchy::pantry_bank_distances(deref(plan, "plan").plan,
                                                    deref(matrix, "matrix").matrix);
    if (out_per_pantry) std::copy(d.per_pantry.begin(), d.per_pantry.end(), out_per_pantry);
    if (out_total) *out_total = d.total;
    if (out_mean) *out_mean = d.mean;
  });
}

fl_status fl_plan_write_json(const fl_plan* plan, const fl_households* households,
                             const char* metadata_json, const char* path) {
  return try_([&] {
    io::write_json(path_arg(path),
                   io::plan_to_json(deref(plan, "plan").plan,
                                    deref(households, "households").items,
                                    metadata(metadata_json)));
  });
}

fl_status fl_plan_write_geojson(const fl_plan* plan,
                                const fl_households* households,
                                const char* metadata_json, const char* path) {
  return try_([&] {
    io::write_json(path_arg(path),
                   io::plan_to_geojson(deref(plan, "plan").plan,
                                       deref(households, "households").items,
                                       metadata(metadata_json)));
  });
}

fl_status fl_plan_read_json(const char* path, fl_plan** out) {
  return try_([&] {
    auto& o = deref_out(out, "out");
    o = new fl_plan{io::plan_from_json(io::read_json(path_arg(path)))};
  });
}

void fl_plan_free(fl_plan* plan) { delete plan; }

/* evaluate */

fl_status fl_facilities_load_csv(const char* path, const char* label,
                                 fl_facilities** out) {
  return try_([&] {
    auto& o = deref_out(out, "out");
    o = new fl_facilities{
        evaluate::load_facilities(path_arg(path), str_or(label, "baseline"))};
  });
}

fl_status fl_facilities_from_points(const fl_point* pts, size_t count,
                                    const char* label, fl_facilities** out) {
  return try_([&] {
    auto& o = deref_out(out, "out");
    evaluate::FacilitySet set;
    set.label = str_or(label, "facilities");
    set.points = points(pts, count);
    for (std::size_t i = 0; i < count; ++i) {
      set.ids.push_back(std::to_string(i));
      set.city.emplace_back();
    }
    evaluate::validate(set);
    o = new fl_facilities{std::move(set)};
  });
}

fl_status fl_facilities_plan_pantries(const fl_plan* plan,
                                      const fl_households* households,
                                      const char* label, fl_facilities** out) {
  return try_([&] {
    auto& o = deref_out(out, "out");
    o = new fl_facilities{evaluate::plan_pantries(
        deref(plan, "plan").plan, deref(households, "households").items,
        str_or(label, "candidate"))};
  });
}

fl_status fl_facilities_plan_banks(const fl_plan* plan,
                                   const fl_households* households,
                                   const char* label, fl_facilities** out) {
  return try_([&] {
    auto& o = deref_out(out, "out");
    o = new fl_facilities{evaluate::plan_banks(
        deref(plan, "plan").plan, deref(households, "households").items,
        str_or(label, "candidate"))};
  });
}

size_t fl_facilities_count(const fl_facilities* f) {
  return f ? f->set.points.size() : 0;
}

void fl_facilities_free(fl_facilities* facilities) { delete facilities; }

fl_status fl_compare(const fl_facilities* candidate,
                     const fl_facilities* baseline,
                     const fl_households* households,
                     const fl_provider_spec* spec, const fl_city_box* boxes,
                     size_t box_count, int use_weights, fl_report** out) {
  return try_([&] {
    auto& o = deref_out(out, "out");
    const auto& cand = deref(candidate, "candidate").set;
    const auto& base = deref(baseline, "baseline").set;
    const auto& hh = deref(households, "households").items;
    const auto spec_ = provider(spec);
    if (box_count && !boxes) {
      throw Error(ErrorKind::InvalidArgument, "boxes must not be null");
    }
    std::vector<evaluate::CityBox> cities;
    for (std::size_t i = 0; i < box_count; ++i) {
      cities.push_back({str(boxes[i].name), boxes[i].min_lat, boxes[i].max_lat,
                        boxes[i].min_lon, boxes[i].max_lon});
    }
    evaluate::validate(cand);
    evaluate::validate(base);
    const auto pts = ingest::locations(hh);
    const auto to_cand = distance::build_matrix(spec_, pts, cand.points);
    const auto to_base = distance::build_matrix(spec_, pts, base.points);
    const auto groups = evaluate::household_groups(hh, cities);
    const auto w = ingest::weights(hh);
    const auto ws = use_weights ? std::span<const double>(w) : std::span<const double>();
    auto result = std::make_unique<fl_report>();
    result->report = evaluate::compare(to_cand, to_base, groups, ws, cand.label,
                                       base.label);
    result->candidate_meters = evaluate::nearest_facility_stats(to_cand, ws).per_household;
    result->baseline_meters = evaluate::nearest_facility_stats(to_base, ws).per_household;
    o = result.release();
  });
}

fl_status fl_compare_matrices(const fl_matrix* to_candidate,
                              const fl_matrix* to_baseline,
                              const double* weights, fl_report** out) {
  return try_([&] {
    auto& o = deref_out(out, "out");
    const auto& c = deref(to_candidate, "to_candidate").matrix;
    const auto& b = deref(to_baseline, "to_baseline").matrix;
    const auto ws = weight_span(weights, c.rows());
    auto result = std::make_unique<fl_report>();
    result->report = evaluate::compare(c, b, {}, ws);
    result->candidate_meters = evaluate::nearest_facility_stats(c, ws).per_household;
    result->baseline_meters = evaluate::nearest_facility_stats(b, ws).per_household;
    o = result.release();
  });
}

fl_status fl_report_add_penalty(fl_report* report, const fl_plan* plan,
                                const fl_households* households,
                                const fl_facilities* baseline_banks,
                                const fl_facilities* baseline_pantries,
                                const fl_provider_spec* spec) {
  return try_([&] {
    auto& r = deref_out(report, "report");
    r.report.penalty = evaluate::penalty_report(
        deref(plan, "plan").plan, deref(households, "households").items,
        deref(baseline_banks, "baseline_banks").set,
        deref(baseline_pantries, "baseline_pantries").set, provider(spec));
  });
}

namespace {
fl_penalty to_c(const evaluate::PenaltyBlock& p) {
  return fl_penalty{p.candidate_pantries, p.baseline_pantries, p.candidate_avg,
                    p.baseline_avg,       p.candidate_total,   p.baseline_total,
                    p.per_pantry_avg,     p.total};
}
}  // namespace

fl_status fl_penalty_from(const double* candidate_meters, size_t count,
                          const fl_matrix* baseline_pantry_to_bank,
                          fl_penalty* out) {
  return try_([&] {
    auto& o = deref_out(out, "out");
    if (count && !candidate_meters) {
      throw Error(ErrorKind::InvalidArgument, "candidate distances must not be null");
    }
    o = to_c(evaluate::penalty_from(
        std::span<const double>(candidate_meters, count),
        deref(baseline_pantry_to_bank, "baseline matrix").matrix));
  });
}

size_t fl_report_group_count(const fl_report* r) {
  return r ? r->report.groups.size() : 0;
}

fl_status fl_report_group(const fl_report* report, size_t index,
                          fl_group_stats* out) {
  return try_([&] {
    const auto& groups = deref(report, "report").report.groups;
    auto& o = deref_out(out, "out");
    if (index >= groups.size()) {
      throw Error(ErrorKind::InvalidArgument, "group index out of range");
    }
    const auto& g = groups[index];
    o = fl_group_stats{g.group.c_str(),   g.household_count,
                       g.total_weight,    g.candidate_avg,
                       g.baseline_avg,    g.saving_abs,
                       g.saving_pct.has_value(), g.saving_pct.value_or(0.0),
                       g.candidate_total, g.baseline_total};
  });
}

int fl_report_penalty(const fl_report* report, fl_penalty* out) {
  if (!report || !report->report.penalty) return 0;
  if (out) *out = to_c(*report->report.penalty);
  return 1;
}

fl_status fl_report_write_json(const fl_report* report,
                               const char* metadata_json, const char* path) {
  return try_([&] {
    io::write_json(path_arg(path),
                   io::report_to_json(deref(report, "report").report,
                                      metadata(metadata_json)));
  });
}

fl_status fl_report_write_csv(const fl_report* report, const char* path) {
  return try_([&] {
    io::write_text(path_arg(path),
                   io::report_to_csv(deref(report, "report").report));
  });
}

fl_status fl_report_write_households_geojson(const fl_report* report,
                                             const fl_households* households,
                                             const char* metadata_json,
                                             const char* path) {
  return try_([&] {
    const auto& r = deref(report, "report");
    io::write_json(path_arg(path),
                   io::households_to_geojson(
                       deref(households, "households").items,
                       r.candidate_meters, r.baseline_meters, r.report,
                       metadata(metadata_json)));
  });
}

void fl_report_free(fl_report* report) { delete report; }

}  // extern "C"
