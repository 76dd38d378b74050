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

#include <cmath>
#include <cstdint>
#include <vector>

#include "foodloc/ingest.hpp"

namespace foodloc::synth {

/// Gaussian blobs of households with lognormal incomes. Stands in for
/// survey or census extracts that cannot be redistributed.
struct SynthParams {
  std::size_t clusters = 2;
  std::size_t points_per_cluster = 5;
  double spread_km = 2.0;
  // Blob centers; drawn uniformly from the bounding box when empty.
  std::vector<GeoPoint> centers;
  double min_lat = 34.0;
  double max_lat = 38.0;
  double min_lon = -122.0;
  double max_lon = -118.0;
  double income_log_mean = std::log(35000.0);
  double income_log_sd = 0.5;
  std::uint64_t seed = 0;
};

void validate(const SynthParams& params);

/// Households blob by blob; ids "b<c>-<j>", city tag "blob<c>".
std::vector<ingest::Household> generate(const SynthParams& params);

}  // namespace foodloc::synth
