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
#include "foodloc/geo.hpp"

#include <algorithm>
#include <numbers>

namespace foodloc {

double great_circle(const GeoPoint& a, const GeoPoint& b,
                    double earth_radius) noexcept {
  if (a == b) return 0.0;
  constexpr double kRad = std::numbers::pi / 180.0;
  const double phi1 = a.lat * kRad;
  const double phi2 = b.lat * kRad;
  const double dphi = (b.lat - a.lat) * kRad;
  const double dlambda = (b.lon - a.lon) * kRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * earth_radius * std::asin(std::sqrt(h));
}

}  // namespace foodloc
