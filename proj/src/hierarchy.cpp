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
#include "foodloc/hierarchy.hpp"

#include <algorithm>
#include <cstdint>
#include <fmt/format.h>
#include <numeric>

#include "foodloc/error.hpp"

namespace foodloc::hierarchy {

using distance::DistanceMatrix;

std::vector<std::size_t> allocate_pantry_counts(
    std::span<const std::size_t> cluster_sizes, std::size_t total) {
  const std::size_t sum =
      std::accumulate(cluster_sizes.begin(), cluster_sizes.end(), std::size_t{0});
  const auto nonempty = static_cast<std::size_t>(std::count_if(
      cluster_sizes.begin(), cluster_sizes.end(), [](auto s) { return s > 0; }));
  if (total < nonempty || total > sum) {
    throw Error(ErrorKind::Solve,
                fmt::format("cannot place {} pantries over {} nonempty clusters "
                            "holding {} households",
                            total, nonempty, sum));
  }

  // Quotas are total*size/sum; work with numerators over `sum` so that
  // remainder comparisons are exact.
  const auto S = static_cast<std::int64_t>(sum);
  const auto T = static_cast<std::int64_t>(total);
  const std::size_t k = cluster_sizes.size();
  std::vector<std::size_t> counts(k, 0);
  auto remainder = [&](std::size_t c) {
    return T * static_cast<std::int64_t>(cluster_sizes[c]) -
           static_cast<std::int64_t>(counts[c]) * S;
  };

  std::size_t assigned = 0;
  for (std::size_t c = 0; c < k; ++c) {
    if (cluster_sizes[c] == 0) continue;
    counts[c] = std::max<std::size_t>(
        1, static_cast<std::size_t>(T * static_cast<std::int64_t>(cluster_sizes[c]) / S));
    assigned += counts[c];
  }

  while (assigned < total) {
    std::size_t pick = k;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] >= cluster_sizes[c]) continue;
      if (pick == k || remainder(c) > remainder(pick)) pick = c;
    }
    ++counts[pick];
    ++assigned;
  }
  // Minimum-one bumps can overshoot; take back from the most over-served.
  while (assigned > total) {
    std::size_t pick = k;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] <= 1) continue;
      if (pick == k || remainder(c) <= remainder(pick)) pick = c;
    }
    --counts[pick];
    --assigned;
  }
  return counts;
}

PlacementPlan place_two_level(const DistanceMatrix& matrix,
                              const HierarchyParams& params,
                              std::span<const double> weights) {
  if (!matrix.square()) {
    throw Error(ErrorKind::InvalidArgument,
                "two-level placement needs a square household matrix");
  }
  const std::size_t n = matrix.rows();
  std::vector<double> w(weights.begin(), weights.end());
  if (w.empty()) w.assign(n, 1.0);
  if (params.k_pantries_total < 1 || params.k_pantries_total > n) {
    throw Error(ErrorKind::Solve,
                fmt::format("k_pantries_total = {} out of range for {} households",
                            params.k_pantries_total, n));
  }

  PlacementPlan plan;
  auto bank_params = params.bank_solver;
  bank_params.k = params.k_banks;
  bank_params.weights = w;
  const auto level1 = kmedoids::solve(matrix, bank_params);
  plan.banks = level1.medoids;
  plan.household_to_bank = level1.assignment;
  plan.level1_objective = level1.objective;
  plan.level1_passes = level1.passes;

  std::vector<std::vector<std::size_t>> members(plan.banks.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = std::lower_bound(plan.banks.begin(), plan.banks.end(),
                                     level1.assignment[i]);
    members[static_cast<std::size_t>(it - plan.banks.begin())].push_back(i);
  }
  std::vector<std::size_t> sizes;
  for (const auto& m : members) sizes.push_back(m.size());
  const auto counts = allocate_pantry_counts(sizes, params.k_pantries_total);

  for (std::size_t c = 0; c < members.size(); ++c) {
    const auto& idx = members[c];
    const auto sub = matrix.submatrix(idx);
    auto pantry_params = params.pantry_solver;
    pantry_params.k = counts[c];
    pantry_params.weights.clear();
    for (auto i : idx) pantry_params.weights.push_back(w[i]);
    const auto level2 = kmedoids::solve(sub, pantry_params);
    for (auto m : level2.medoids) {
      plan.pantries.push_back(idx[m]);
      plan.pantry_to_bank.push_back(plan.banks[c]);
    }
    plan.level2_passes.push_back(level2.passes);
  }

  std::vector<std::size_t> sorted_pantries = plan.pantries;
  std::sort(sorted_pantries.begin(), sorted_pantries.end());
  auto nearest = kmedoids::assign(matrix, sorted_pantries, w);
  plan.household_to_pantry = std::move(nearest.assignment);
  plan.level2_objective = nearest.objective;
  return plan;
}

BankDistances pantry_bank_distances(const PlacementPlan& plan,
                                    const DistanceMatrix& matrix) {
  if (plan.pantries.size() != plan.pantry_to_bank.size()) {
    throw Error(ErrorKind::InvalidArgument, "plan pantry/bank lists disagree");
  }
  BankDistances out;
  for (std::size_t p = 0; p < plan.pantries.size(); ++p) {
    const auto bank = plan.pantry_to_bank[p];
    const auto pantry = plan.pantries[p];
    if (bank >= matrix.rows() || pantry >= matrix.cols()) {
      throw Error(ErrorKind::InvalidArgument, "plan index outside the matrix");
    }
    const double d = bank == pantry ? 0.0 : matrix(pantry, bank);
    out.per_pantry.push_back(d);
    out.total += d;
  }
  if (!out.per_pantry.empty()) {
    out.mean = out.total / static_cast<double>(out.per_pantry.size());
  }
  return out;
}

}  // namespace foodloc::hierarchy
