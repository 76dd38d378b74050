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
#include <span>
#include <vector>

#include "foodloc/distance.hpp"
#include "foodloc/kmedoids.hpp"

namespace foodloc::hierarchy {

struct HierarchyParams {
  std::size_t k_banks = 1;
  std::size_t k_pantries_total = 1;
  // Both levels use the mode/seed/epsilon/max_passes of these; k and
  // weights are filled in per solve.
  kmedoids::SolveParams bank_solver;
  kmedoids::SolveParams pantry_solver;
};

struct PlacementPlan {
  std::vector<std::size_t> banks;           // household indices, ascending
  std::vector<std::size_t> pantries;        // grouped by bank, ascending within
  std::vector<std::size_t> pantry_to_bank;  // bank household index per pantry
  std::vector<std::size_t> household_to_pantry;
  std::vector<std::size_t> household_to_bank;  // level-1 assignment
  double level1_objective = 0.0;
  double level2_objective = 0.0;
  std::size_t level1_passes = 0;
  std::vector<std::size_t> level2_passes;  // per bank cluster
};

/// Largest-remainder apportionment of `total` over clusters proportional to
/// size, at least one per nonempty cluster and at most its size. Equal
/// remainders favor the lower cluster index.
std::vector<std::size_t> allocate_pantry_counts(
    std::span<const std::size_t> cluster_sizes, std::size_t total);

/// Banks by K-Medoids over all households, then pantries by K-Medoids inside
/// each bank's cluster. Households use their globally nearest pantry.
PlacementPlan place_two_level(const distance::DistanceMatrix& matrix,
                              const HierarchyParams& params,
                              std::span<const double> weights);

struct BankDistances {
  std::vector<double> per_pantry;  // pantry -> its bank, meters
  double total = 0.0;
  double mean = 0.0;
};

BankDistances pantry_bank_distances(const PlacementPlan& plan,
                                    const distance::DistanceMatrix& matrix);

}  // namespace foodloc::hierarchy
