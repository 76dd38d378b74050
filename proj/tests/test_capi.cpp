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
#include <doctest.h>

#include <cstring>
#include <string>
#include <vector>

#include "foodloc/foodloc.h"
#include "test_util.hpp"

namespace {

std::vector<double> line(const std::vector<double>& xs) {
  std::vector<double> m;
  for (double a : xs)
    for (double b : xs) m.push_back(a > b ? a - b : b - a);
  return m;
}

void count_swaps(void* user, size_t, size_t, size_t, double) { ++*static_cast<int*>(user); }

}  // namespace

TEST_CASE("status names and errors") {
  CHECK(fl_version() > 0);
  CHECK(std::string(fl_status_name(FL_ERR_SOLVE)) == "solve error");
  fl_matrix* m = nullptr;
  CHECK(fl_matrix_from_values(2, nullptr, &m) == FL_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(fl_last_error()) > 0);
  CHECK(m == nullptr);
  CHECK(fl_matrix_load(nullptr, &m) == FL_ERR_INVALID_ARGUMENT);
  CHECK(fl_matrix_load("/nonexistent/x.dmat", &m) != FL_OK);
  const char* text = "123456789";
  CHECK(fl_crc32(text, 9) == 0xCBF43926u);
  fl_matrix_free(nullptr);
  fl_households_free(nullptr);
}

TEST_CASE("ingest through the C API") {
  fl_csv_schema schema{};
  schema.id_column = "block_id";
  schema.lat_column = "latitude";
  schema.lon_column = "longitude";
  schema.income_column = "median_income";
  fl_households* raw = nullptr;
  REQUIRE(fl_households_load_csv(fixture("households_ca10.csv").c_str(), &schema, &raw) == FL_OK);
  CHECK(fl_households_count(raw) == 10);

  fl_ingest_config cfg;
  fl_ingest_config_init(&cfg);
  CHECK(cfg.income_cap == 40000.0);
  cfg.weighting_mode = FL_WEIGHTING_DUPLICATE;
  fl_households* prepared = nullptr;
  REQUIRE(fl_households_prepare(raw, &cfg, &prepared) == FL_OK);
  CHECK(fl_households_count(prepared) == 11);

  fl_household_view v{};
  REQUIRE(fl_households_get(prepared, 0, &v) == FL_OK);
  CHECK(std::string(v.origin_id) == "ca-001");
  CHECK(v.has_income == 1);
  CHECK(v.weight == 1.0);
  CHECK(fl_households_get(prepared, 99, &v) == FL_ERR_INVALID_ARGUMENT);

  double w = 0;
  CHECK(fl_compute_weight(40000, 5, 50, &w) == FL_OK);
  CHECK(w == 1.25);
  CHECK(fl_compute_weight(0, 5, 50, &w) == FL_ERR_INGEST);

  TempDir dir;
  const auto path = (dir / "h.csv").string();
  CHECK(fl_households_save_csv(prepared, path.c_str()) == FL_OK);
  fl_households* back = nullptr;
  REQUIRE(fl_households_load_csv(path.c_str(), nullptr, &back) == FL_OK);
  CHECK(fl_households_count(back) == 11);

  fl_households_free(back);
  fl_households_free(prepared);
  fl_households_free(raw);
}

TEST_CASE("solve and brute force through the C API") {
  const auto vals = line({0, 1, 5, 6});
  fl_matrix* m = nullptr;
  REQUIRE(fl_matrix_from_values(4, vals.data(), &m) == FL_OK);
  fl_solve_params p;
  fl_solve_params_init(&p);
  p.k = 2;
  int swaps = 0;
  p.trace = count_swaps;
  p.trace_user = &swaps;
  fl_clustering* c = nullptr;
  REQUIRE(fl_solve(m, &p, nullptr, &c) == FL_OK);
  CHECK(fl_clustering_objective(c) == 2.0);
  CHECK(fl_clustering_k(c) == 2);
  CHECK(fl_clustering_medoids(c)[0] == 0);
  CHECK(fl_clustering_medoids(c)[1] == 3);
  CHECK(swaps == 1);
  fl_clustering_free(c);

  fl_clustering* b = nullptr;
  REQUIRE(fl_brute_force_solve(m, 2, nullptr, &b) == FL_OK);
  CHECK(fl_clustering_medoids(b)[1] == 2);
  fl_clustering_free(b);

  p.k = 5;
  c = nullptr;
  CHECK(fl_solve(m, &p, nullptr, &c) == FL_ERR_SOLVE);
  CHECK(c == nullptr);
  fl_matrix_free(m);
}

TEST_CASE("matrix build, cache and placement through the C API") {
  fl_synth_params sp;
  fl_synth_params_init(&sp);
  sp.clusters = 2;
  sp.points_per_cluster = 15;
  sp.seed = 9;
  fl_households* hh = nullptr;
  REQUIRE(fl_synth_generate(&sp, &hh) == FL_OK);

  fl_provider_spec spec;
  fl_provider_spec_init(&spec);
  fl_matrix* m = nullptr;
  REQUIRE(fl_matrix_build_households(&spec, hh, &m) == FL_OK);
  CHECK(fl_matrix_rows(m) == 30);
  CHECK(fl_matrix_matches(m, hh, &spec) == 1);

  TempDir dir;
  const auto path = (dir / "m.dmat").string();
  REQUIRE(fl_matrix_save(m, path.c_str()) == FL_OK);
  fl_matrix* loaded = nullptr;
  REQUIRE(fl_matrix_load(path.c_str(), &loaded) == FL_OK);
  CHECK(std::memcmp(fl_matrix_data(loaded), fl_matrix_data(m), 30 * 30 * sizeof(double)) == 0);
  CHECK(fl_matrix_matches(loaded, hh, &spec) == 1);
  spec.earth_radius = 6378137.0;
  CHECK(fl_matrix_matches(loaded, hh, &spec) == 0);
  fl_provider_spec_init(&spec);

  fl_hierarchy_params hp;
  fl_hierarchy_params_init(&hp);
  hp.k_banks = 2;
  hp.k_pantries_total = 4;
  fl_plan* plan = nullptr;
  REQUIRE(fl_place_two_level(m, &hp, nullptr, &plan) == FL_OK);
  CHECK(fl_plan_bank_count(plan) == 2);
  CHECK(fl_plan_pantry_count(plan) == 4);
  CHECK(fl_plan_household_count(plan) == 30);
  double total = -1, mean = -1;
  CHECK(fl_plan_bank_distances(plan, m, nullptr, &total, &mean) == FL_OK);
  CHECK(total >= 0.0);

  const auto plan_path = (dir / "plan.json").string();
  REQUIRE(fl_plan_write_json(plan, hh, "{\"seed\":9}", plan_path.c_str()) == FL_OK);
  CHECK(fl_plan_write_json(plan, hh, "[broken", plan_path.c_str()) != FL_OK);
  fl_plan* reread = nullptr;
  REQUIRE(fl_plan_read_json(plan_path.c_str(), &reread) == FL_OK);
  CHECK(fl_plan_pantry_count(reread) == 4);
  for (size_t i = 0; i < 4; ++i) CHECK(fl_plan_pantries(reread)[i] == fl_plan_pantries(plan)[i]);

  fl_facilities* cand = nullptr;
  REQUIRE(fl_facilities_plan_pantries(plan, hh, "candidate", &cand) == FL_OK);
  fl_facilities* banks = nullptr;
  REQUIRE(fl_facilities_plan_banks(plan, hh, "banks", &banks) == FL_OK);
  fl_report* report = nullptr;
  REQUIRE(fl_compare(cand, cand, hh, &spec, nullptr, 0, 0, &report) == FL_OK);
  // Synthetic households carry blob tags, so two city groups precede overall.
  REQUIRE(fl_report_group_count(report) == 3);
  fl_group_stats g{};
  REQUIRE(fl_report_group(report, 2, &g) == FL_OK);
  CHECK(std::string(g.group) == "overall");
  CHECK(g.saving_abs_mi == 0.0);
  REQUIRE(fl_report_add_penalty(report, plan, hh, banks, cand, &spec) == FL_OK);
  fl_penalty pen{};
  REQUIRE(fl_report_penalty(report, &pen) == 1);
  CHECK(pen.candidate_pantries == 4);
  CHECK(pen.total_mi <= 1e-9);
  CHECK(fl_report_write_csv(report, (dir / "r.csv").string().c_str()) == FL_OK);
  CHECK(fl_report_write_json(report, nullptr, (dir / "r.json").string().c_str()) == FL_OK);
  CHECK(fl_report_write_households_geojson(report, hh, nullptr,
                                           (dir / "h.geojson").string().c_str()) == FL_OK);
  CHECK(slurp(dir / "r.csv").rfind("group,", 0) == 0);

  fl_report_free(report);
  fl_facilities_free(banks);
  fl_facilities_free(cand);
  fl_plan_free(reread);
  fl_plan_free(plan);
  fl_matrix_free(loaded);
  fl_matrix_free(m);
  fl_households_free(hh);
}

TEST_CASE("allocation and penalty helpers") {
  const size_t sizes[] = {7, 5, 3};
  size_t counts[3] = {};
  REQUIRE(fl_allocate_pantry_counts(sizes, 3, 5, counts) == FL_OK);
  CHECK(counts[0] == 2);
  CHECK(counts[1] == 2);
  CHECK(counts[2] == 1);
  CHECK(fl_allocate_pantry_counts(sizes, 3, 99, counts) == FL_ERR_SOLVE);

  const double zero[4] = {0, 0, 0, 0};
  fl_matrix* base = nullptr;
  REQUIRE(fl_matrix_from_values(2, zero, &base) == FL_OK);
  const double cand[2] = {1609.344 * 3, 1609.344 * 1};
  fl_penalty p{};
  REQUIRE(fl_penalty_from(cand, 2, base, &p) == FL_OK);
  CHECK(p.per_pantry_avg_mi == doctest::Approx(2.0));
  CHECK(p.total_mi == doctest::Approx(4.0));
  fl_matrix_free(base);
}
