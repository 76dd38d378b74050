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
#include "foodloc/kmedoids.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <limits>
#include <numeric>

#include "foodloc/rng.hpp"

namespace foodloc::kmedoids {

using distance::DistanceMatrix;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void invalid(const std::string& message) {
  throw Error(ErrorKind::InvalidArgument, message);
}

std::vector<double> checked_weights(const DistanceMatrix& matrix,
                                    std::span<const double> weights) {
  if (!matrix.square()) invalid("k-medoids needs a square distance matrix");
  const std::size_t n = matrix.rows();
  if (weights.empty()) return std::vector<double>(n, 1.0);
  if (weights.size() != n) {
    invalid(fmt::format("expected {} weights, got {}", n, weights.size()));
  }
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) invalid("weights must be positive");
  }
  return {weights.begin(), weights.end()};
}

void check_k(std::size_t n, std::size_t k) {
  if (k < 1 || k > n) {
    throw Error(ErrorKind::Solve,
                fmt::format("k = {} out of range for {} points", k, n));
  }
}

// Per-point nearest and second-nearest medoid distances for the current
// medoid slots. Swap evaluation then costs O(n) per candidate.
class SwapState {
 public:
  SwapState(const DistanceMatrix& m, std::span<const double> w,
            std::vector<std::size_t> medoids)
      : m_(m), w_(w), slots_(std::move(medoids)), is_medoid_(m.rows(), false) {
    for (auto s : slots_) is_medoid_[s] = true;
    refresh();
  }

  std::size_t k() const { return slots_.size(); }
  std::size_t medoid(std::size_t slot) const { return slots_[slot]; }
  bool is_medoid(std::size_t i) const { return is_medoid_[i]; }
  double objective() const { return objective_; }
  std::size_t nearest_slot(std::size_t i) const { return near_slot_[i]; }

  double swapped_objective(std::size_t slot, std::size_t in) const {
    double total = 0.0;
    for (std::size_t i = 0; i < m_.rows(); ++i) {
      const double keep = near_slot_[i] == slot ? second_[i] : near_[i];
      const double to_in = i == in ? 0.0 : m_(i, in);
      total += w_[i] * std::min(to_in, keep);
    }
    return total;
  }

  // Weighted distance from the members of `slot`'s cluster to `to`.
  double cluster_cost(std::size_t slot, std::size_t to) const {
    double total = 0.0;
    for (std::size_t i = 0; i < m_.rows(); ++i) {
      if (near_slot_[i] == slot) total += w_[i] * m_(i, to);
    }
    return total;
  }

  void swap(std::size_t slot, std::size_t in) {
    is_medoid_[slots_[slot]] = false;
    slots_[slot] = in;
    is_medoid_[in] = true;
    refresh();
  }

  Clustering result(std::size_t passes) const {
    Clustering c;
    c.medoids = slots_;
    std::sort(c.medoids.begin(), c.medoids.end());
    auto a = assign(m_, c.medoids, w_);
    c.assignment = std::move(a.assignment);
    c.objective = a.objective;
    c.passes = passes;
    return c;
  }

 private:
  void refresh() {
    const std::size_t n = m_.rows();
    const std::size_t k = slots_.size();
    near_.assign(n, kInf);
    second_.assign(n, kInf);
    near_slot_.assign(n, 0);
    objective_ = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = k;
      for (std::size_t s = 0; s < k; ++s) {
        const double d = slots_[s] == i ? 0.0 : m_(i, slots_[s]);
        const bool better =
            best == k || slots_[s] == i ||
            (slots_[best] != i &&
             (d < near_[i] || (d == near_[i] && slots_[s] < slots_[best])));
        if (better) {
          best = s;
          near_[i] = d;
        }
      }
      for (std::size_t s = 0; s < k; ++s) {
        if (s != best) second_[i] = std::min(second_[i], m_(i, slots_[s]));
      }
      near_slot_[i] = best;
      objective_ += w_[i] * near_[i];
    }
  }

  const DistanceMatrix& m_;
  std::span<const double> w_;
  std::vector<std::size_t> slots_;
  std::vector<bool> is_medoid_;
  std::vector<double> near_;
  std::vector<double> second_;
  std::vector<std::size_t> near_slot_;
  double objective_ = 0.0;
};

}  // namespace

MaxPassesExceeded::MaxPassesExceeded(Clustering best)
    : Error(ErrorKind::Solve,
            fmt::format("no convergence within {} passes (best objective {})",
                        best.passes, best.objective)),
      best_(std::move(best)) {}

std::vector<std::size_t> initialize(std::size_t n, std::size_t k) {
  check_k(n, k);
  std::vector<std::size_t> medoids(k);
  std::iota(medoids.begin(), medoids.end(), std::size_t{0});
  return medoids;
}

Assignment assign(const DistanceMatrix& matrix,
                  std::span<const std::size_t> medoids,
                  std::span<const double> weights) {
  const auto w = checked_weights(matrix, weights);
  const std::size_t n = matrix.rows();
  if (medoids.empty()) invalid("assignment needs at least one medoid");
  std::vector<bool> is_medoid(n, false);
  for (auto m : medoids) {
    if (m >= n) invalid(fmt::format("medoid {} out of range", m));
    is_medoid[m] = true;
  }

  Assignment out;
  out.assignment.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (is_medoid[i]) {
      out.assignment[i] = i;
      continue;
    }
    std::size_t best = medoids[0];
    double best_d = matrix(i, best);
    for (auto m : medoids.subspan(1)) {
      const double d = matrix(i, m);
      if (d < best_d || (d == best_d && m < best)) {
        best = m;
        best_d = d;
      }
    }
    out.assignment[i] = best;
  }
  out.objective = objective(matrix, medoids, out.assignment, w);
  return out;
}

double objective(const DistanceMatrix& matrix,
                 std::span<const std::size_t> /*medoids*/,
                 std::span<const std::size_t> assignment,
                 std::span<const double> weights) {
  const auto w = checked_weights(matrix, weights);
  if (assignment.size() != matrix.rows()) {
    invalid("assignment length must match the point count");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const double d = assignment[i] == i ? 0.0 : matrix(i, assignment[i]);
    total += w[i] * d;
  }
  return total;
}

Clustering solve(const DistanceMatrix& matrix, const SolveParams& params) {
  const auto w = checked_weights(matrix, params.weights);
  const std::size_t n = matrix.rows();
  check_k(n, params.k);
  if (!(params.epsilon > 0.0)) invalid("epsilon must be positive");
  if (params.max_passes && *params.max_passes < 1) {
    invalid("max_passes must be at least 1");
  }

  SwapState state(matrix, w, initialize(n, params.k));
  SplitMix64 rng(params.seed);
  const std::size_t k = params.k;
  std::vector<std::size_t> schedule(k * n);

  // Best state seen; in PaperLiteral mode the objective is not monotone.
  Clustering best = state.result(0);

  for (std::size_t pass = 1;; ++pass) {
    std::iota(schedule.begin(), schedule.end(), std::size_t{0});
    partial_shuffle(std::span<std::size_t>(schedule), schedule.size(), rng);

    bool changed = false;
    for (std::size_t code : schedule) {
      const std::size_t slot = code / n;
      const std::size_t in = code % n;
      if (state.is_medoid(in)) continue;

      if (params.mode == SolveMode::GlobalSwap) {
        const double next = state.swapped_objective(slot, in);
        if (!(next < state.objective() - params.epsilon)) continue;
      } else {
        if (state.nearest_slot(in) != slot) continue;
        const double before = state.cluster_cost(slot, state.medoid(slot));
        const double after = state.cluster_cost(slot, in);
        if (!(after < before - params.epsilon)) continue;
        if (state.swapped_objective(slot, in) > state.objective()) continue;
      }

      const std::size_t out = state.medoid(slot);
      state.swap(slot, in);
      changed = true;
      if (params.trace) {
        params.trace(SwapEvent{pass, out, in, state.objective()});
      }
      if (state.objective() < best.objective) best = state.result(pass);
    }

    if (!changed) return state.result(pass);
    if (params.max_passes && pass >= *params.max_passes) {
      if (params.mode == SolveMode::GlobalSwap) best = state.result(pass);
      best.passes = pass;
      throw MaxPassesExceeded(std::move(best));
    }
  }
}

Clustering brute_force_solve(const DistanceMatrix& matrix, std::size_t k,
                             std::span<const double> weights) {
  const auto w = checked_weights(matrix, weights);
  const std::size_t n = matrix.rows();
  check_k(n, k);

  // C(n, k) with early exit past the limit.
  constexpr double kLimit = 1e6;
  double subsets = 1.0;
  for (std::size_t i = 0; i < std::min(k, n - k); ++i) {
    subsets = subsets * static_cast<double>(n - i) / static_cast<double>(i + 1);
    if (subsets > kLimit + 0.5) {
      throw Error(ErrorKind::Solve,
                  fmt::format("brute force over C({}, {}) subsets exceeds 10^6",
                              n, k));
    }
  }

  std::vector<std::size_t> combo = initialize(n, k);
  Clustering best;
  best.objective = kInf;
  for (;;) {
    auto a = assign(matrix, combo, w);
    if (a.objective < best.objective) {
      best.medoids = combo;
      best.assignment = std::move(a.assignment);
      best.objective = a.objective;
    }
    ++best.passes;
    // Next combination in lexicographic order.
    std::size_t i = k;
    while (i > 0 && combo[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++combo[i - 1];
    for (std::size_t j = i; j < k; ++j) combo[j] = combo[j - 1] + 1;
  }
  return best;
}

}  // namespace foodloc::kmedoids
