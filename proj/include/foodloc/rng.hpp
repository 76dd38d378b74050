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
#include <span>
#include <utility>

namespace foodloc {

/// splitmix64 (Steele, Lea, Flood 2014). Every seeded component of the
/// toolkit draws from this generator so results are portable across
/// platforms and standard libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Index in [0, bound) by plain modulo reduction; bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept { return next() % bound; }

  // Uniform double in [0, 1) from the top 53 bits.
  double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

// Partial Fisher-Yates: after the call, items[0..count) hold a uniformly
// chosen ordered selection. Position i swaps with i + below(size - i).
template <class T>
void partial_shuffle(std::span<T> items, std::size_t count, SplitMix64& rng) {
  const std::size_t n = items.size();
  for (std::size_t i = 0; i < count && i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    using std::swap;
    swap(items[i], items[j]);
  }
}

}  // namespace foodloc
