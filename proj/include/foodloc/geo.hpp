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

namespace foodloc {

inline constexpr double kMeanEarthRadiusMeters = 6371000.0;
inline constexpr double kMetersPerMile = 1609.344;

/// WGS84 position in degrees.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

inline bool is_valid(const GeoPoint& p) noexcept {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 &&
         p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
}

/// Haversine distance in meters on a sphere of the given radius.
double great_circle(const GeoPoint& a, const GeoPoint& b,
                    double earth_radius = kMeanEarthRadiusMeters) noexcept;

}  // namespace foodloc
