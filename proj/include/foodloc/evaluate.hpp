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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "foodloc/distance.hpp"
#include "foodloc/hierarchy.hpp"
#include "foodloc/ingest.hpp"

namespace foodloc::evaluate {

struct FacilitySet {
  std::string label;
  std::vector<std::string> ids;
  std::vector<GeoPoint> points;
  std::vector<std::optional<std::string>> city;
};

void validate(const FacilitySet& set);

/// Reads a facility CSV with lat and lon columns and optional id and city.
FacilitySet load_facilities(const std::filesystem::path& path,
                            std::string label);

/// Facilities at the plan's pantry (or bank) households.
FacilitySet plan_pantries(const hierarchy::PlacementPlan& plan,
                          std::span<const ingest::Household> households,
                          std::string label);
FacilitySet plan_banks(const hierarchy::PlacementPlan& plan,
                       std::span<const ingest::Household> households,
                       std::string label);

struct CityBox {
  std::string name;
  double min_lat = -90.0;
  double max_lat = 90.0;
  double min_lon = -180.0;
  double max_lon = 180.0;
};

/// Household city: the explicit tag if present, else the first box that
/// contains the household.
std::vector<std::optional<std::string>> household_groups(
    std::span<const ingest::Household> households,
    std::span<const CityBox> boxes);

struct NearestStats {
  std::vector<double> per_household;  // meters
  std::vector<std::size_t> nearest;   // facility column index
  double mean = 0.0;                  // meters, weighted when weights given
  double total = 0.0;
  double total_weight = 0.0;
};

/// Row minima of a households x facilities matrix. Without weights every
/// row counts once, which is how duplicated household lists realize
/// weighting; with weights the mean is sum(w*d)/sum(w).
NearestStats nearest_facility_stats(const distance::DistanceMatrix& to_facilities,
                                    std::span<const double> weights = {});

NearestStats nearest_facility_stats(
    std::span<const ingest::Household> households,
    const FacilitySet& facilities, const distance::ProviderSpec& provider,
    bool use_weights = false);

struct GroupStats {
  std::string group;
  std::size_t household_count = 0;
  double total_weight = 0.0;
  double candidate_avg = 0.0;  // miles
  double baseline_avg = 0.0;
  double saving_abs = 0.0;
  std::optional<double> saving_pct;  // absent when baseline_avg is 0
  double candidate_total = 0.0;
  double baseline_total = 0.0;
};

/// Pantry-to-bank distance penalty; positive means the candidate is worse.
struct PenaltyBlock {
  std::size_t candidate_pantries = 0;
  std::size_t baseline_pantries = 0;
  double candidate_avg = 0.0;  // miles
  double baseline_avg = 0.0;
  double candidate_total = 0.0;
  double baseline_total = 0.0;
  double per_pantry_avg = 0.0;
  double total = 0.0;
};

struct EvaluationReport {
  std::string candidate_label;
  std::string baseline_label;
  std::vector<GroupStats> groups;  // cities in name order, then "overall"
  std::optional<PenaltyBlock> penalty;
};

inline double meters_to_miles(double meters) { return meters / kMetersPerMile; }

/// Savings block from average and total distances already in miles.
GroupStats make_group(std::string group, std::size_t household_count,
                      double total_weight, double candidate_avg,
                      double baseline_avg, double candidate_total,
                      double baseline_total);

/// Per-group and overall comparison from households x facilities matrices.
EvaluationReport compare(const distance::DistanceMatrix& to_candidate,
                         const distance::DistanceMatrix& to_baseline,
                         std::span<const std::optional<std::string>> groups,
                         std::span<const double> weights = {},
                         std::string candidate_label = "candidate",
                         std::string baseline_label = "baseline");

EvaluationReport compare(const FacilitySet& candidate,
                         const FacilitySet& baseline,
                         std::span<const ingest::Household> households,
                         const distance::ProviderSpec& provider,
                         std::span<const CityBox> boxes = {},
                         bool use_weights = false);

/// Penalty from candidate per-pantry bank distances and a baseline
/// pantries x banks matrix; each baseline pantry is served by its nearest
/// baseline bank.
PenaltyBlock penalty_from(std::span<const double> candidate_meters,
                          const distance::DistanceMatrix& baseline_pantry_to_bank);

PenaltyBlock penalty_report(const hierarchy::PlacementPlan& candidate_plan,
                            std::span<const ingest::Household> households,
                            const FacilitySet& baseline_banks,
                            const FacilitySet& baseline_pantries,
                            const distance::ProviderSpec& provider);

/// Neumaier-compensated sum in index order.
double compensated_sum(std::span<const double> values);

}  // namespace foodloc::evaluate
