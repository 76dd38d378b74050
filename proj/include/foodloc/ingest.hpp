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
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "foodloc/geo.hpp"

namespace foodloc::ingest {

struct Household {
  std::string id;
  GeoPoint location;
  std::optional<double> income;  // dollars per year
  double weight = 1.0;
  std::string origin_id;
  std::optional<std::string> city;
};

/// Column names used to read a household CSV. Empty optional columns are
/// ignored; an empty id column numbers rows from 0 in file order.
struct CsvSchema {
  std::string id_column;
  std::string lat_column = "lat";
  std::string lon_column = "lon";
  std::string income_column;
  std::string weight_column;
  std::string origin_column;
  std::string city_column;
};

enum class WeightingMode { None, Duplicate, Direct };

struct IngestConfig {
  double income_cap = 40000.0;
  std::optional<std::size_t> sample_size;  // nullopt means "all"
  std::uint64_t seed = 0;
  WeightingMode weighting_mode = WeightingMode::None;
  double weight_numerator = 5.0;
  double weight_cap = 50.0;
};

void validate(const IngestConfig& config);

/// Reads households in file order. Weight defaults to 1 and origin_id to id
/// unless the schema names those columns.
std::vector<Household> load_households(const std::filesystem::path& path,
                                       const CsvSchema& schema);

/// Writes id,lat,lon,income,weight,origin_id,city. Reals are written with
/// round-trip precision so a reload is lossless.
void save_households(const std::filesystem::path& path,
                     std::span<const Household> households);

/// Schema matching the columns written by save_households.
CsvSchema prepared_schema();

/// Keeps households whose income is absent or at most `cap`.
std::vector<Household> filter_by_income(std::span<const Household> households,
                                        double cap);

/// Uniform n-subset by partial Fisher-Yates over splitmix64, returned in
/// selection order. n >= size returns the input unchanged.
std::vector<Household> sample(std::span<const Household> households,
                              std::size_t n, std::uint64_t seed);

/// numerator / (income / 10000), capped at weight_cap. Throws for income <= 0.
double compute_weight(double income, double numerator = 5.0,
                      double weight_cap = 50.0);

/// Sets weight from income; households without income get 1.0.
std::vector<Household> apply_income_weights(
    std::span<const Household> households, double numerator = 5.0,
    double weight_cap = 50.0);

/// Half-away-from-zero rounding, never below one copy.
std::size_t copy_count(double weight);

/// Repeats household i copy_count(w_i) times with weight 1. Copies are
/// adjacent and keep the source's origin_id.
std::vector<Household> duplicate_by_weight(
    std::span<const Household> households);

/// filter -> sample -> weight -> duplicate, as selected by the config.
std::vector<Household> prepare(std::span<const Household> households,
                               const IngestConfig& config);

std::vector<GeoPoint> locations(std::span<const Household> households);
std::vector<double> weights(std::span<const Household> households);

}  // namespace foodloc::ingest
