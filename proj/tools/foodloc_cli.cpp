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
// foodloc command-line front end. Stages communicate through files in the
// output directory:
//
//   synth     -> synthetic.csv
//   ingest    -> households.csv
//   matrix    -> matrix.dmat
//   place     -> plan.json, plan.geojson
//   evaluate  -> report.json, report.csv, households.geojson
//
// Non-JSON outputs get a <file>.meta.json sidecar with the seed and config
// hash. Exit codes: 1 usage/config, 2 ingest, 3 distance, 4 solve,
// 5 evaluate.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "foodloc/foodloc.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode {
  kExitOk = 0,
  kExitUsage = 1,
  kExitIngest = 2,
  kExitDistance = 3,
  kExitSolve = 4,
  kExitEvaluate = 5,
};

struct StageError {
  int code;
  std::string message;
};

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Households = std::unique_ptr<fl_households, Deleter<fl_households, fl_households_free>>;
using Matrix = std::unique_ptr<fl_matrix, Deleter<fl_matrix, fl_matrix_free>>;
using Plan = std::unique_ptr<fl_plan, Deleter<fl_plan, fl_plan_free>>;
using Facilities = std::unique_ptr<fl_facilities, Deleter<fl_facilities, fl_facilities_free>>;
using Report = std::unique_ptr<fl_report, Deleter<fl_report, fl_report_free>>;

// Library failures exit with the code of their error class when that class
// is one of the pipeline stages, otherwise with the running stage's code.
void check(fl_status status, int stage_code, const std::string& context) {
  if (status == FL_OK) return;
  int code = stage_code;
  switch (status) {
    case FL_ERR_INGEST: code = kExitIngest; break;
    case FL_ERR_DISTANCE: code = kExitDistance; break;
    case FL_ERR_SOLVE: code = kExitSolve; break;
    case FL_ERR_EVALUATE: code = kExitEvaluate; break;
    default: break;
  }
  throw StageError{code, context + ": " + fl_last_error()};
}

[[noreturn]] void usage_error(const std::string& message) {
  throw StageError{kExitUsage, message};
}

// Overrides collected from flags; empty optionals leave the config alone.
struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<std::string> out_dir;
  bool force = false;
  bool trace = false;

  std::optional<std::string> dataset;
  std::optional<std::string> sample_size;
  std::optional<std::string> weighting;
  std::optional<double> income_cap;

  std::optional<std::string> provider;
  std::optional<std::string> base_url;
  std::optional<std::size_t> chunk_size;
  std::optional<std::string> replay_file;

  std::optional<std::size_t> k_banks;
  std::optional<std::size_t> k_pantries;
  std::optional<std::string> mode;

  std::optional<std::string> baseline_pantries;
  std::optional<std::string> baseline_banks;

  std::optional<std::size_t> clusters;
  std::optional<std::size_t> points_per_cluster;
  std::optional<double> spread_km;
  std::optional<std::string> synth_output;
};

json load_config(const Flags& flags) {
  json config = json::object();
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) usage_error("cannot open config " + flags.config_path);
    try {
      in >> config;
    } catch (const json::exception& e) {
      usage_error("invalid config " + flags.config_path + ": " + e.what());
    }
    if (!config.is_object()) usage_error("config must be a JSON object");
  }
  auto set = [&](const char* section, const char* key, const auto& value) {
    if (value) config[section][key] = *value;
  };
  if (flags.seed) config["seed"] = *flags.seed;
  if (flags.out_dir) config["out_dir"] = *flags.out_dir;
  if (flags.threads) config["provider"]["max_in_flight"] = *flags.threads;
  set("dataset", "path", flags.dataset);
  if (flags.sample_size) {
    if (*flags.sample_size == "all") {
      config["ingest"]["sample_size"] = "all";
    } else {
      try {
        config["ingest"]["sample_size"] = std::stoull(*flags.sample_size);
      } catch (const std::exception&) {
        usage_error("--sample-size must be a positive integer or 'all'");
      }
    }
  }
  set("ingest", "weighting_mode", flags.weighting);
  set("ingest", "income_cap", flags.income_cap);
  set("provider", "kind", flags.provider);
  set("provider", "base_url", flags.base_url);
  set("provider", "chunk_size", flags.chunk_size);
  set("provider", "replay_file", flags.replay_file);
  set("hierarchy", "k_banks", flags.k_banks);
  set("hierarchy", "k_pantries_total", flags.k_pantries);
  set("hierarchy", "mode", flags.mode);
  set("baseline", "pantries", flags.baseline_pantries);
  set("baseline", "banks", flags.baseline_banks);
  set("synth", "clusters", flags.clusters);
  set("synth", "points_per_cluster", flags.points_per_cluster);
  set("synth", "spread_km", flags.spread_km);
  set("synth", "output", flags.synth_output);
  return config;
}

template <class T>
T get_or(const json& config, const char* section, const char* key, T fallback) {
  if (!config.contains(section) || !config[section].contains(key) ||
      config[section][key].is_null()) {
    return fallback;
  }
  try {
    return config[section][key].get<T>();
  } catch (const json::exception&) {
    usage_error(std::string("config field ") + section + "." + key +
                " has the wrong type");
  }
}

std::optional<std::string> get_path(const json& config, const char* section,
                                    const char* key) {
  auto v = get_or<std::string>(config, section, key, "");
  if (v.empty()) return std::nullopt;
  return v;
}

struct Run {
  json config;
  std::uint64_t seed = 0;
  fs::path out_dir;
  std::string config_hash;
  bool force = false;
  bool trace = false;

  fs::path out(const char* name) const { return out_dir / name; }

  std::string metadata(const char* stage, json extra = json::object()) const {
    json meta = {{"tool", "foodloc"},
                 {"version", "1.0.0"},
                 {"stage", stage},
                 {"seed", seed},
                 {"config_hash", config_hash}};
    for (auto& [k, v] : extra.items()) meta[k] = v;
    return meta.dump();
  }

  void write_sidecar(const fs::path& file, const char* stage, int stage_code) const {
    std::ofstream out(file.string() + ".meta.json", std::ios::trunc);
    out << json::parse(metadata(stage, {{"file", file.filename().string()}})).dump(2)
        << "\n";
    if (!out) throw StageError{stage_code, "cannot write sidecar for " + file.string()};
  }
};

Run make_run(const Flags& flags) {
  Run run;
  run.config = load_config(flags);
  try {
    run.seed = run.config.value("seed", std::uint64_t{0});
    run.out_dir = run.config.value("out_dir", std::string("out"));
  } catch (const json::exception&) {
    usage_error("config seed/out_dir have the wrong type");
  }
  const std::string canonical = run.config.dump();
  char hex[9];
  std::snprintf(hex, sizeof hex, "%08x",
                static_cast<unsigned>(fl_crc32(canonical.data(), canonical.size())));
  run.config_hash = hex;
  run.force = flags.force;
  run.trace = flags.trace;
  std::error_code ec;
  fs::create_directories(run.out_dir, ec);
  if (ec) usage_error("cannot create output directory " + run.out_dir.string());
  return run;
}

// Provider strings must outlive the fl_provider_spec that points at them.
struct ProviderConfig {
  std::string base_url;
  std::string profile;
  std::string replay_file;
  fl_provider_spec spec{};
};

ProviderConfig provider_config(const json& config) {
  ProviderConfig p;
  fl_provider_spec_init(&p.spec);
  const auto kind = get_or<std::string>(config, "provider", "kind", "great_circle");
  if (kind == "great_circle") {
    p.spec.kind = FL_PROVIDER_GREAT_CIRCLE;
  } else if (kind == "table_api") {
    p.spec.kind = FL_PROVIDER_TABLE_API;
  } else {
    usage_error("provider.kind must be great_circle or table_api");
  }
  p.base_url = get_or<std::string>(config, "provider", "base_url", "");
  p.profile = get_or<std::string>(config, "provider", "profile", "driving");
  p.replay_file = get_or<std::string>(config, "provider", "replay_file", "");
  p.spec.base_url = p.base_url.empty() ? nullptr : p.base_url.c_str();
  p.spec.profile = p.profile.c_str();
  p.spec.replay_file = p.replay_file.empty() ? nullptr : p.replay_file.c_str();
  p.spec.chunk_size = get_or<std::size_t>(config, "provider", "chunk_size", p.spec.chunk_size);
  p.spec.earth_radius = get_or<double>(config, "provider", "earth_radius", p.spec.earth_radius);
  p.spec.max_in_flight =
      get_or<std::size_t>(config, "provider", "max_in_flight", p.spec.max_in_flight);
  p.spec.max_attempts = get_or<int>(config, "provider", "max_attempts", p.spec.max_attempts);
  p.spec.retry_base_delay =
      get_or<double>(config, "provider", "retry_base_delay", p.spec.retry_base_delay);
  return p;
}

fl_weighting weighting_mode(const json& config) {
  const auto mode = get_or<std::string>(config, "ingest", "weighting_mode", "none");
  if (mode == "none") return FL_WEIGHTING_NONE;
  if (mode == "duplicate") return FL_WEIGHTING_DUPLICATE;
  if (mode == "direct") return FL_WEIGHTING_DIRECT;
  usage_error("ingest.weighting_mode must be none, duplicate or direct");
}

Households load_prepared(const Run& run, int stage_code) {
  const auto path = run.out("households.csv");
  if (!fs::exists(path)) {
    throw StageError{stage_code, path.string() + " not found; run 'ingest' first"};
  }
  fl_households* h = nullptr;
  check(fl_households_load_csv(path.c_str(), nullptr, &h), stage_code, "loading households");
  return Households(h);
}

// ---------------------------------------------------------------- commands

int cmd_synth(const Run& run) {
  fl_synth_params params;
  fl_synth_params_init(&params);
  const auto& c = run.config;
  params.clusters = get_or<std::size_t>(c, "synth", "clusters", params.clusters);
  params.points_per_cluster =
      get_or<std::size_t>(c, "synth", "points_per_cluster", params.points_per_cluster);
  params.spread_km = get_or<double>(c, "synth", "spread_km", params.spread_km);
  params.min_lat = get_or<double>(c, "synth", "min_lat", params.min_lat);
  params.max_lat = get_or<double>(c, "synth", "max_lat", params.max_lat);
  params.min_lon = get_or<double>(c, "synth", "min_lon", params.min_lon);
  params.max_lon = get_or<double>(c, "synth", "max_lon", params.max_lon);
  params.income_log_mean = get_or<double>(c, "synth", "income_log_mean", params.income_log_mean);
  params.income_log_sd = get_or<double>(c, "synth", "income_log_sd", params.income_log_sd);
  params.seed = run.seed;
  std::vector<fl_point> centers;
  for (const auto& p : get_or<json>(c, "synth", "centers", json::array())) {
    try {
      centers.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    } catch (const json::exception&) {
      usage_error("synth.centers must be [[lat, lon], ...]");
    }
  }
  if (!centers.empty()) {
    params.centers = centers.data();
    params.center_count = centers.size();
  }
  const fs::path output = get_or<std::string>(c, "synth", "output",
                                              run.out("synthetic.csv").string());
  fl_households* raw = nullptr;
  check(fl_synth_generate(&params, &raw), kExitUsage, "synth");
  Households households(raw);
  check(fl_households_save_csv(households.get(), output.c_str()), kExitUsage, "synth");
  run.write_sidecar(output, "synth", kExitUsage);
  std::cout << "wrote " << fl_households_count(households.get()) << " households to "
            << output.string() << "\n";
  return kExitOk;
}

// Column names from the first line, unquoted and trimmed.
std::vector<std::string> csv_header(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) {
    cell.erase(0, cell.find_first_not_of(" \t\""));
    cell.erase(cell.find_last_not_of(" \t\"") + 1);
    out.push_back(cell);
  }
  return out;
}

int cmd_ingest(const Run& run) {
  const auto& c = run.config;
  const auto dataset = get_path(c, "dataset", "path");
  if (!dataset) throw StageError{kExitIngest, "dataset.path is required (--dataset)"};

  const json schema = c.contains("dataset") ? c["dataset"].value("schema", json::object())
                                            : json::object();
  auto column = [&](const char* key, const char* fallback) {
    try {
      return schema.value(key, std::string(fallback));
    } catch (const json::exception&) {
      usage_error(std::string("dataset.schema.") + key + " must be a string");
    }
  };
  const std::string id_cfg = column("id", "");
  const std::string lat = column("lat", "lat");
  const std::string lon = column("lon", "lon");
  const std::string income_cfg = column("income", "");
  const std::string city = column("city", "");

  fl_ingest_config cfg;
  fl_ingest_config_init(&cfg);
  cfg.income_cap = get_or<double>(c, "ingest", "income_cap", cfg.income_cap);
  cfg.weight_numerator = get_or<double>(c, "ingest", "weight_numerator", cfg.weight_numerator);
  cfg.weight_cap = get_or<double>(c, "ingest", "weight_cap", cfg.weight_cap);
  cfg.weighting_mode = weighting_mode(c);
  cfg.seed = run.seed;
  const json sample = get_or<json>(c, "ingest", "sample_size", json("all"));
  if (sample.is_number_unsigned() && sample.get<std::uint64_t>() >= 1) {
    cfg.sample_size = sample.get<std::uint64_t>();
  } else if (!(sample.is_string() && sample.get<std::string>() == "all")) {
    usage_error("ingest.sample_size must be a positive integer or \"all\"");
  }

  if (!fs::exists(*dataset)) {
    throw StageError{kExitIngest, "dataset " + *dataset + " not found"};
  }
  // Unconfigured id and income columns are picked up when the header has them.
  const auto header = csv_header(*dataset);
  auto optional_column = [&](const std::string& configured, const char* name) {
    if (!configured.empty()) return configured;
    return std::find(header.begin(), header.end(), name) != header.end() ? std::string(name)
                                                                        : std::string();
  };
  const std::string id = optional_column(id_cfg, "id");
  const std::string income = optional_column(income_cfg, "income");
  const fl_csv_schema s{id.c_str(), lat.c_str(), lon.c_str(), income.c_str(),
                        nullptr,    nullptr,     city.c_str()};

  fl_households* raw = nullptr;
  check(fl_households_load_csv(dataset->c_str(), &s, &raw), kExitIngest, "ingest");
  Households loaded(raw);
  check(fl_households_prepare(loaded.get(), &cfg, &raw), kExitIngest, "ingest");
  Households prepared(raw);

  const auto output = run.out("households.csv");
  check(fl_households_save_csv(prepared.get(), output.c_str()), kExitIngest, "ingest");
  run.write_sidecar(output, "ingest", kExitIngest);
  std::cout << "ingested " << fl_households_count(loaded.get()) << " rows -> "
            << fl_households_count(prepared.get()) << " households in "
            << output.string() << "\n";
  return kExitOk;
}

int cmd_matrix(const Run& run) {
  const auto provider = provider_config(run.config);
  auto households = load_prepared(run, kExitDistance);
  const auto path = run.out("matrix.dmat");

  if (!run.force && fs::exists(path)) {
    fl_matrix* cached = nullptr;
    if (fl_matrix_load(path.c_str(), &cached) == FL_OK) {
      Matrix m(cached);
      if (fl_matrix_matches(m.get(), households.get(), &provider.spec)) {
        std::cout << "cache hit: " << path.string() << "\n";
        return kExitOk;
      }
    }
  }

  fl_matrix* raw = nullptr;
  check(fl_matrix_build_households(&provider.spec, households.get(), &raw),
        kExitDistance, "matrix");
  Matrix matrix(raw);
  check(fl_matrix_save(matrix.get(), path.c_str()), kExitDistance, "matrix");
  run.write_sidecar(path, "matrix", kExitDistance);
  std::cout << "wrote " << fl_matrix_rows(matrix.get()) << "x"
            << fl_matrix_cols(matrix.get()) << " matrix to " << path.string() << "\n";
  return kExitOk;
}

void print_swap(void* user, size_t pass, size_t out_index, size_t in_index,
                double objective) {
  std::fprintf(stderr, "%s pass=%zu out=%zu in=%zu objective=%.6f\n",
               static_cast<const char*>(user), pass, out_index, in_index, objective);
}

int cmd_place(const Run& run) {
  const auto& c = run.config;
  auto households = load_prepared(run, kExitSolve);
  const auto path = run.out("matrix.dmat");
  fl_matrix* raw = nullptr;
  check(fl_matrix_load(path.c_str(), &raw), kExitSolve, "loading " + path.string());
  Matrix matrix(raw);
  if (fl_matrix_rows(matrix.get()) != fl_households_count(households.get())) {
    throw StageError{kExitSolve, "matrix does not match households; rerun 'matrix'"};
  }

  fl_hierarchy_params params;
  fl_hierarchy_params_init(&params);
  params.k_banks = get_or<std::size_t>(c, "hierarchy", "k_banks", 1);
  params.k_pantries_total = get_or<std::size_t>(c, "hierarchy", "k_pantries_total", 1);
  const auto mode = get_or<std::string>(c, "hierarchy", "mode", "global_swap");
  if (mode != "global_swap" && mode != "paper_literal") {
    usage_error("hierarchy.mode must be global_swap or paper_literal");
  }
  for (auto* s : {&params.bank_solver, &params.pantry_solver}) {
    s->mode = mode == "paper_literal" ? FL_SOLVE_PAPER_LITERAL : FL_SOLVE_GLOBAL_SWAP;
    s->seed = run.seed;
    s->epsilon = get_or<double>(c, "hierarchy", "epsilon", s->epsilon);
    s->max_passes = get_or<std::size_t>(c, "hierarchy", "max_passes", 0);
  }
  static const char kBanks[] = "level1";
  static const char kPantries[] = "level2";
  if (run.trace) {
    params.bank_solver.trace = print_swap;
    params.bank_solver.trace_user = const_cast<char*>(kBanks);
    params.pantry_solver.trace = print_swap;
    params.pantry_solver.trace_user = const_cast<char*>(kPantries);
  }

  std::vector<double> weights(fl_households_count(households.get()));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    fl_household_view v;
    check(fl_households_get(households.get(), i, &v), kExitSolve, "place");
    weights[i] = v.weight;
  }

  fl_plan* plan_raw = nullptr;
  check(fl_place_two_level(matrix.get(), &params, weights.data(), &plan_raw),
        kExitSolve, "place");
  Plan plan(plan_raw);

  const std::string meta = run.metadata(
      "place", {{"k_banks", params.k_banks},
                {"k_pantries_total", params.k_pantries_total},
                {"mode", mode},
                {"matrix_provider", fl_matrix_provider_tag(matrix.get())}});
  check(fl_plan_write_json(plan.get(), households.get(), meta.c_str(),
                           run.out("plan.json").c_str()),
        kExitSolve, "place");
  check(fl_plan_write_geojson(plan.get(), households.get(), meta.c_str(),
                              run.out("plan.geojson").c_str()),
        kExitSolve, "place");
  std::printf("placed %zu banks and %zu pantries; level-1 objective %.2f m, "
              "level-2 objective %.2f m\n",
              fl_plan_bank_count(plan.get()), fl_plan_pantry_count(plan.get()),
              fl_plan_level1_objective(plan.get()),
              fl_plan_level2_objective(plan.get()));
  return kExitOk;
}

int cmd_evaluate(const Run& run) {
  const auto& c = run.config;
  auto households = load_prepared(run, kExitEvaluate);
  const auto plan_path = run.out("plan.json");
  fl_plan* plan_raw = nullptr;
  check(fl_plan_read_json(plan_path.c_str(), &plan_raw), kExitEvaluate,
        "loading " + plan_path.string());
  Plan plan(plan_raw);
  if (fl_plan_household_count(plan.get()) != fl_households_count(households.get())) {
    throw StageError{kExitEvaluate, "plan does not match households; rerun 'place'"};
  }

  const auto pantries_path = get_path(c, "baseline", "pantries");
  if (!pantries_path) {
    throw StageError{kExitEvaluate, "baseline.pantries is required (--baseline-pantries)"};
  }
  fl_facilities* raw = nullptr;
  check(fl_facilities_load_csv(pantries_path->c_str(), "baseline", &raw),
        kExitEvaluate, "baseline pantries");
  Facilities baseline(raw);
  check(fl_facilities_plan_pantries(plan.get(), households.get(), "candidate", &raw),
        kExitEvaluate, "candidate pantries");
  Facilities candidate(raw);

  std::vector<std::string> names;
  std::vector<fl_city_box> boxes;
  const json cities = get_or<json>(c, "evaluate", "cities", json::array());
  names.reserve(cities.size());
  for (const auto& city : cities) {
    try {
      names.push_back(city.at("name").get<std::string>());
      boxes.push_back({names.back().c_str(), city.at("min_lat").get<double>(),
                       city.at("max_lat").get<double>(), city.at("min_lon").get<double>(),
                       city.at("max_lon").get<double>()});
    } catch (const json::exception&) {
      usage_error("evaluate.cities entries need name, min_lat, max_lat, min_lon, max_lon");
    }
  }
  const bool use_weights = get_or<bool>(c, "evaluate", "use_weights",
                                        weighting_mode(c) == FL_WEIGHTING_DIRECT);
  const auto provider = provider_config(c);

  fl_report* report_raw = nullptr;
  check(fl_compare(candidate.get(), baseline.get(), households.get(), &provider.spec,
                   boxes.data(), boxes.size(), use_weights ? 1 : 0, &report_raw),
        kExitEvaluate, "compare");
  Report report(report_raw);

  if (const auto banks_path = get_path(c, "baseline", "banks")) {
    check(fl_facilities_load_csv(banks_path->c_str(), "baseline", &raw), kExitEvaluate,
          "baseline banks");
    Facilities banks(raw);
    check(fl_report_add_penalty(report.get(), plan.get(), households.get(), banks.get(),
                                baseline.get(), &provider.spec),
          kExitEvaluate, "penalty");
  }

  const std::string meta = run.metadata("evaluate", {{"use_weights", use_weights}});
  check(fl_report_write_json(report.get(), meta.c_str(), run.out("report.json").c_str()),
        kExitEvaluate, "evaluate");
  const auto csv_path = run.out("report.csv");
  check(fl_report_write_csv(report.get(), csv_path.c_str()), kExitEvaluate, "evaluate");
  run.write_sidecar(csv_path, "evaluate", kExitEvaluate);
  check(fl_report_write_households_geojson(report.get(), households.get(), meta.c_str(),
                                           run.out("households.geojson").c_str()),
        kExitEvaluate, "evaluate");

  for (std::size_t i = 0; i < fl_report_group_count(report.get()); ++i) {
    fl_group_stats g;
    check(fl_report_group(report.get(), i, &g), kExitEvaluate, "evaluate");
    std::printf("%-12s households=%zu candidate=%.2f mi baseline=%.2f mi saving=%.2f mi",
                g.group, g.household_count, g.candidate_avg_mi, g.baseline_avg_mi,
                g.saving_abs_mi);
    if (g.has_saving_pct) std::printf(" (%.1f%%)", g.saving_pct);
    std::printf("\n");
  }
  fl_penalty penalty;
  if (fl_report_penalty(report.get(), &penalty)) {
    std::printf("bank penalty: %.2f mi per pantry, %.2f mi total\n",
                penalty.per_pantry_avg_mi, penalty.total_mi);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-level K-Medoids placement of food banks and pantries"};
  app.require_subcommand(1);
  Flags flags;

  app.add_option("--config", flags.config_path, "JSON run configuration")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", flags.seed, "Seed for sampling, synthesis and solvers");
  app.add_option("--threads", flags.threads, "Concurrent distance requests")
      ->check(CLI::PositiveNumber);
  app.add_option("--out-dir", flags.out_dir, "Directory for stage outputs");
  app.add_flag("--force", flags.force, "Rebuild cached outputs");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic household CSV");
  synth->add_option("--clusters", flags.clusters);
  synth->add_option("--points-per-cluster", flags.points_per_cluster);
  synth->add_option("--spread-km", flags.spread_km);
  synth->add_option("--output", flags.synth_output);

  auto* ingest = app.add_subcommand("ingest", "Filter, sample and weight households");
  ingest->add_option("--dataset", flags.dataset, "Household CSV");
  ingest->add_option("--sample-size", flags.sample_size, "Positive integer or 'all'");
  ingest->add_option("--weighting", flags.weighting, "none, duplicate or direct");
  ingest->add_option("--income-cap", flags.income_cap, "Dollars per year");

  auto* matrix = app.add_subcommand("matrix", "Build the household distance matrix");
  matrix->add_option("--provider", flags.provider, "great_circle or table_api");
  matrix->add_option("--base-url", flags.base_url, "Table service root URL");
  matrix->add_option("--chunk-size", flags.chunk_size, "Coordinates per request");
  matrix->add_option("--replay", flags.replay_file, "Recorded table responses");

  auto* place = app.add_subcommand("place", "Two-level bank and pantry placement");
  place->add_option("--k-banks", flags.k_banks);
  place->add_option("--k-pantries", flags.k_pantries);
  place->add_option("--mode", flags.mode, "global_swap or paper_literal");
  place->add_flag("--trace", flags.trace, "Print accepted swaps to stderr");

  auto* evaluate = app.add_subcommand("evaluate", "Compare against baseline facilities");
  evaluate->add_option("--baseline-pantries", flags.baseline_pantries);
  evaluate->add_option("--baseline-banks", flags.baseline_banks);
  evaluate->add_option("--provider", flags.provider, "great_circle or table_api");
  evaluate->add_option("--base-url", flags.base_url, "Table service root URL");

  for (auto* sub : {synth, ingest, matrix, place, evaluate}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    const Run run = make_run(flags);
    if (*synth) return cmd_synth(run);
    if (*ingest) return cmd_ingest(run);
    if (*matrix) return cmd_matrix(run);
    if (*place) return cmd_place(run);
    if (*evaluate) return cmd_evaluate(run);
  } catch (const StageError& e) {
    std::cerr << "foodloc: " << e.message << "\n";
    return e.code;
  }
  return kExitUsage;
}
