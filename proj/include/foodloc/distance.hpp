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
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "foodloc/geo.hpp"

namespace foodloc::distance {

/// Dense row-major sources x destinations distances in meters. Immutable
/// once constructed; construction rejects negative or non-finite cells.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::vector<GeoPoint> sources,
                 std::vector<GeoPoint> destinations,
                 std::vector<double> values, std::string provider_tag,
                 std::string created_at);

  /// Square matrix over anonymous points; used for synthetic and test
  /// instances where only the metric matters.
  static DistanceMatrix from_values(std::size_t n, std::vector<double> values,
                                    std::string provider_tag = "explicit");

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double operator()(std::size_t row, std::size_t col) const noexcept {
    return values_[row * cols_ + col];
  }
  std::span<const double> row(std::size_t r) const noexcept {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const double> values() const noexcept { return values_; }

  const std::vector<GeoPoint>& sources() const noexcept { return sources_; }
  const std::vector<GeoPoint>& destinations() const noexcept {
    return destinations_;
  }
  const std::string& provider_tag() const noexcept { return provider_tag_; }
  const std::string& created_at() const noexcept { return created_at_; }

  /// Restriction to the given point indices (square matrices only).
  DistanceMatrix submatrix(std::span<const std::size_t> indices) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<GeoPoint> sources_;
  std::vector<GeoPoint> destinations_;
  std::vector<double> values_;
  std::string provider_tag_;
  std::string created_at_;
};

enum class ProviderKind { TableApi, GreatCircle };

struct ProviderSpec {
  ProviderKind kind = ProviderKind::GreatCircle;
  std::string base_url;       // table_api only, e.g. http://localhost:5000
  std::string profile = "driving";
  std::size_t chunk_size = 100;  // coordinates per table request
  double earth_radius = kMeanEarthRadiusMeters;
  std::size_t max_in_flight = 4;
  int max_attempts = 3;
  double retry_base_delay = 0.5;  // seconds, doubled per retry
  std::string replay_file;        // serve requests from a recorded fixture
};

void validate(const ProviderSpec& spec);

/// Stable description of the provider recorded in cache files.
std::string provider_tag(const ProviderSpec& spec);

struct HttpResult {
  bool transport_ok = false;
  int status = 0;
  std::string body;
  std::string error;
};

/// Issues GET requests for a request target (path plus query).
class TableTransport {
 public:
  virtual ~TableTransport() = default;
  virtual HttpResult get(const std::string& target) = 0;
};

using TransportFactory =
    std::function<std::unique_ptr<TableTransport>(const ProviderSpec&)>;

/// HTTP for base_url, or fixture replay when replay_file is set.
std::unique_ptr<TableTransport> make_transport(const ProviderSpec& spec);

/// Recorded request-target -> response-body pairs, replayed offline.
class ReplayTransport final : public TableTransport {
 public:
  explicit ReplayTransport(const std::filesystem::path& fixture);
  HttpResult get(const std::string& target) override;

 private:
  std::vector<std::pair<std::string, std::string>> exchanges_;
};

/// Path and query for one table call: sources first, then destinations.
std::string table_target(const ProviderSpec& spec,
                         std::span<const GeoPoint> sources,
                         std::span<const GeoPoint> destinations);

/// One table call. Returns the |sources| x |destinations| block row-major.
std::vector<double> table_request(const ProviderSpec& spec,
                                  TableTransport& transport,
                                  std::span<const GeoPoint> sources,
                                  std::span<const GeoPoint> destinations);
std::vector<double> table_request(const ProviderSpec& spec,
                                  std::span<const GeoPoint> sources,
                                  std::span<const GeoPoint> destinations);

/// Full matrix from the provider. Table requests are tiled so that each
/// carries at most chunk_size coordinates; tiles run concurrently.
DistanceMatrix build_matrix(const ProviderSpec& spec,
                            std::span<const GeoPoint> sources,
                            std::span<const GeoPoint> destinations,
                            const TransportFactory& factory = make_transport);

/// DMAT1 cache file.
void save_matrix(const DistanceMatrix& matrix,
                 const std::filesystem::path& path);
DistanceMatrix load_matrix(const std::filesystem::path& path);

/// UTC timestamp for created_at. Honors SOURCE_DATE_EPOCH when set.
std::string current_timestamp();

}  // namespace foodloc::distance
