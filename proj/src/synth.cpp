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
#include "foodloc/synth.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <numbers>

#include "foodloc/error.hpp"
#include "foodloc/rng.hpp"

namespace foodloc::synth {

namespace {

constexpr double kKmPerDegree = 111.195;

// Box-Muller on splitmix64 draws; std::normal_distribution is not
// reproducible across standard libraries.
double standard_normal(SplitMix64& rng) {
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

void validate(const SynthParams& p) {
  auto bad = [](const std::string& m) { throw Error(ErrorKind::InvalidArgument, m); };
  if (p.clusters < 1) bad("synth needs at least one cluster");
  if (p.points_per_cluster < 1) bad("synth needs at least one point per cluster");
  if (!(p.spread_km >= 0.0) || !std::isfinite(p.spread_km)) bad("spread_km must be >= 0");
  if (!p.centers.empty() && p.centers.size() != p.clusters) {
    bad(fmt::format("{} centers given for {} clusters", p.centers.size(), p.clusters));
  }
  for (const auto& c : p.centers) {
    if (!is_valid(c)) bad("invalid synth center");
  }
  if (!(p.min_lat <= p.max_lat) || !(p.min_lon <= p.max_lon) ||
      !is_valid({p.min_lat, p.min_lon}) || !is_valid({p.max_lat, p.max_lon})) {
    bad("invalid synth bounding box");
  }
  if (!(p.income_log_sd >= 0.0) || !std::isfinite(p.income_log_mean)) {
    bad("invalid income distribution");
  }
}

std::vector<ingest::Household> generate(const SynthParams& params) {
  validate(params);
  SplitMix64 rng(params.seed);
  std::vector<GeoPoint> centers = params.centers;
  if (centers.empty()) {
    for (std::size_t c = 0; c < params.clusters; ++c) {
      const double lat = params.min_lat + (params.max_lat - params.min_lat) * rng.uniform();
      const double lon = params.min_lon + (params.max_lon - params.min_lon) * rng.uniform();
      centers.push_back({lat, lon});
    }
  }

  std::vector<ingest::Household> out;
  out.reserve(params.clusters * params.points_per_cluster);
  for (std::size_t c = 0; c < params.clusters; ++c) {
    const auto center = centers[c];
    const double lat_sd = params.spread_km / kKmPerDegree;
    const double lon_sd =
        lat_sd / std::max(0.01, std::cos(center.lat * std::numbers::pi / 180.0));
    for (std::size_t j = 0; j < params.points_per_cluster; ++j) {
      ingest::Household h;
      h.id = fmt::format("b{}-{}", c, j);
      h.origin_id = h.id;
      h.city = fmt::format("blob{}", c);
      h.location.lat = std::clamp(center.lat + lat_sd * standard_normal(rng), -90.0, 90.0);
      h.location.lon = std::clamp(center.lon + lon_sd * standard_normal(rng), -180.0, 180.0);
      const double income = std::exp(params.income_log_mean +
                                     params.income_log_sd * standard_normal(rng));
      h.income = std::max(1.0, std::round(income));
      out.push_back(std::move(h));
    }
  }
  return out;
}

}  // namespace foodloc::synth
