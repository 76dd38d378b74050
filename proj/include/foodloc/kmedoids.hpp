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
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "foodloc/distance.hpp"
#include "foodloc/error.hpp"

/// K-Medoids over a square distance matrix. Point i's distance to medoid m
/// is matrix(i, m), so directed road matrices read as "point travels to
/// facility".
namespace foodloc::kmedoids {

enum class SolveMode {
  // Each pass tries every (medoid, non-medoid) swap in a seeded order and
  // keeps a swap iff the global objective drops by more than epsilon.
  GlobalSwap,
  // A swap must first shrink the total distance inside the outgoing
  // medoid's cluster; it is then kept unless the global objective rises.
  PaperLiteral,
};

struct SwapEvent {
  std::size_t pass = 0;
  std::size_t out_index = 0;
  std::size_t in_index = 0;
  double objective = 0.0;
};

struct SolveParams {
  std::size_t k = 1;
  std::vector<double> weights;  // empty means unit weights
  SolveMode mode = SolveMode::GlobalSwap;
  std::uint64_t seed = 0;
  double epsilon = 1e-6;
  std::optional<std::size_t> max_passes;
  std::function<void(const SwapEvent&)> trace;
};

struct Clustering {
  std::vector<std::size_t> medoids;     // sorted ascending
  std::vector<std::size_t> assignment;  // medoid point index per point
  double objective = 0.0;
  std::size_t passes = 0;
};

struct Assignment {
  std::vector<std::size_t> assignment;
  double objective = 0.0;
};

/// Thrown when max_passes runs out before convergence.
class MaxPassesExceeded : public Error {
 public:
  explicit MaxPassesExceeded(Clustering best);
  const Clustering& best() const noexcept { return best_; }

 private:
  Clustering best_;
};

/// First-K initialization: {0, ..., k-1}.
std::vector<std::size_t> initialize(std::size_t n, std::size_t k);

/// Nearest-medoid assignment. Medoids serve themselves; other points take
/// the lowest-index medoid among those at minimal distance.
Assignment assign(const distance::DistanceMatrix& matrix,
                  std::span<const std::size_t> medoids,
                  std::span<const double> weights);

/// Weighted total distance of an explicit assignment, summed in index order.
double objective(const distance::DistanceMatrix& matrix,
                 std::span<const std::size_t> medoids,
                 std::span<const std::size_t> assignment,
                 std::span<const double> weights);

Clustering solve(const distance::DistanceMatrix& matrix,
                 const SolveParams& params);

/// Exact optimum by enumerating k-subsets in lexicographic order; the first
/// subset reaching the minimum wins. Limited to C(n, k) <= 10^6.
Clustering brute_force_solve(const distance::DistanceMatrix& matrix,
                             std::size_t k, std::span<const double> weights);

}  // namespace foodloc::kmedoids
