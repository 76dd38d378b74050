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
#include "foodloc/distance.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fmt/format.h>
#include <fstream>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "foodloc/error.hpp"

namespace foodloc::distance {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw Error(ErrorKind::Distance, message);
}

struct UnreachablePairs {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

std::string describe_pairs(
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::string out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i == 20) {
      out += fmt::format(" ... ({} total)", pairs.size());
      break;
    }
    out += fmt::format("{}({}, {})", i ? " " : "", pairs[i].first,
                       pairs[i].second);
  }
  return out;
}

class UnreachableError : public Error {
 public:
  explicit UnreachableError(
      std::vector<std::pair<std::size_t, std::size_t>> pairs)
      : Error(ErrorKind::Distance,
              "unreachable pairs (row, col): " + describe_pairs(pairs)),
        pairs_(std::move(pairs)) {}
  const auto& pairs() const { return pairs_; }

 private:
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

class HttpTransport final : public TableTransport {
 public:
  explicit HttpTransport(const std::string& base_url) {
    const auto scheme_end = base_url.find("://");
    const auto host_begin =
        scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_begin = base_url.find('/', host_begin);
    const std::string origin = base_url.substr(0, path_begin);
    if (path_begin != std::string::npos) {
      prefix_ = base_url.substr(path_begin);
      while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    }
    client_ = std::make_unique<httplib::Client>(origin);
    client_->set_connection_timeout(10);
    client_->set_read_timeout(300);
  }

  HttpResult get(const std::string& target) override {
    HttpResult result;
    auto res = client_->Get(prefix_ + target);
    if (!res) {
      result.error = httplib::to_string(res.error());
      return result;
    }
    result.transport_ok = true;
    result.status = res->status;
    result.body = res->body;
    return result;
  }

 private:
  std::string prefix_;
  std::unique_ptr<httplib::Client> client_;
};

void append_coord(std::string& out, const GeoPoint& p) {
  out += fmt::format("{:.6f},{:.6f}", p.lon, p.lat);
}

}  // namespace

DistanceMatrix::DistanceMatrix(std::vector<GeoPoint> sources,
                               std::vector<GeoPoint> destinations,
                               std::vector<double> values,
                               std::string provider_tag,
                               std::string created_at)
    : rows_(sources.size()),
      cols_(destinations.size()),
      sources_(std::move(sources)),
      destinations_(std::move(destinations)),
      values_(std::move(values)),
      provider_tag_(std::move(provider_tag)),
      created_at_(std::move(created_at)) {
  if (values_.size() != rows_ * cols_) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("matrix needs {}x{} values, got {}", rows_, cols_,
                            values_.size()));
  }
  std::vector<std::pair<std::size_t, std::size_t>> bad;
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      const double v = values_[r * cols_ + c];
      if (!std::isfinite(v) || v < 0.0) bad.emplace_back(r, c);
    }
  }
  if (!bad.empty()) throw UnreachableError(std::move(bad));
  if (sources_ == destinations_) {
    for (std::size_t i = 0; i < rows_; ++i) {
      if (values_[i * cols_ + i] != 0.0) {
        throw Error(ErrorKind::Distance,
                    fmt::format("nonzero diagonal at {} in a square matrix", i));
      }
    }
  }
}

DistanceMatrix DistanceMatrix::from_values(std::size_t n,
                                           std::vector<double> values,
                                           std::string provider_tag) {
  std::vector<GeoPoint> points(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Distinct placeholder coordinates keep the identical-sequence check
    // meaningful without implying geography.
    points[i] = GeoPoint{0.0, -180.0 + 360.0 * static_cast<double>(i) /
                                           static_cast<double>(n + 1)};
  }
  auto destinations = points;
  return DistanceMatrix(std::move(points), std::move(destinations),
                        std::move(values), std::move(provider_tag), "");
}

DistanceMatrix DistanceMatrix::submatrix(
    std::span<const std::size_t> indices) const {
  if (!square()) {
    throw Error(ErrorKind::InvalidArgument, "submatrix needs a square matrix");
  }
  std::vector<GeoPoint> pts;
  std::vector<double> vals;
  pts.reserve(indices.size());
  vals.reserve(indices.size() * indices.size());
  for (auto r : indices) {
    if (r >= rows_) throw Error(ErrorKind::InvalidArgument, "index out of range");
    pts.push_back(sources_[r]);
    for (auto c : indices) vals.push_back((*this)(r, c));
  }
  std::vector<GeoPoint> dsts;
  dsts.reserve(indices.size());
  for (auto c : indices) dsts.push_back(destinations_[c]);
  return DistanceMatrix(std::move(pts), std::move(dsts), std::move(vals),
                        provider_tag_, created_at_);
}

void validate(const ProviderSpec& spec) {
  if (spec.chunk_size < 2) {
    throw Error(ErrorKind::InvalidArgument, "chunk_size must be at least 2");
  }
  if (spec.max_in_flight < 1) {
    throw Error(ErrorKind::InvalidArgument, "max_in_flight must be at least 1");
  }
  if (spec.max_attempts < 1) {
    throw Error(ErrorKind::InvalidArgument, "max_attempts must be at least 1");
  }
  if (spec.kind == ProviderKind::TableApi) {
    if (spec.base_url.empty() && spec.replay_file.empty()) {
      throw Error(ErrorKind::InvalidArgument,
                  "table_api provider requires base_url");
    }
  } else {
    if (!spec.base_url.empty()) {
      throw Error(ErrorKind::InvalidArgument,
                  "base_url is only valid for the table_api provider");
    }
    if (!(spec.earth_radius > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "earth_radius must be positive");
    }
  }
}

std::string provider_tag(const ProviderSpec& spec) {
  if (spec.kind == ProviderKind::GreatCircle) {
    return fmt::format("great_circle:r={}", spec.earth_radius);
  }
  return fmt::format("table_api:{}/{}", spec.base_url, spec.profile);
}

std::unique_ptr<TableTransport> make_transport(const ProviderSpec& spec) {
  if (!spec.replay_file.empty()) {
    return std::make_unique<ReplayTransport>(spec.replay_file);
  }
  return std::make_unique<HttpTransport>(spec.base_url);
}

ReplayTransport::ReplayTransport(const std::filesystem::path& fixture) {
  std::ifstream in(fixture);
  if (!in) fail(fmt::format("{}: cannot open replay fixture", fixture.string()));
  json doc;
  try {
    in >> doc;
    for (const auto& ex : doc.at("exchanges")) {
      const auto& body = ex.at("body");
      exchanges_.emplace_back(ex.at("url").get<std::string>(),
                              body.is_string() ? body.get<std::string>()
                                               : body.dump());
    }
  } catch (const json::exception& e) {
    fail(fmt::format("{}: malformed replay fixture: {}", fixture.string(),
                     e.what()));
  }
}

HttpResult ReplayTransport::get(const std::string& target) {
  for (const auto& [url, body] : exchanges_) {
    if (url == target) return HttpResult{true, 200, body, ""};
  }
  return HttpResult{true, 404, R"({"code":"NotRecorded"})", ""};
}

std::string table_target(const ProviderSpec& spec,
                         std::span<const GeoPoint> sources,
                         std::span<const GeoPoint> destinations) {
  std::string target = fmt::format("/table/v1/{}/", spec.profile);
  bool first = true;
  for (const auto* list : {&sources, &destinations}) {
    for (const auto& p : *list) {
      if (!first) target.push_back(';');
      append_coord(target, p);
      first = false;
    }
  }
  target += "?sources=";
  for (std::size_t i = 0; i < sources.size(); ++i) {
    target += fmt::format("{}{}", i ? ";" : "", i);
  }
  target += "&destinations=";
  for (std::size_t j = 0; j < destinations.size(); ++j) {
    target += fmt::format("{}{}", j ? ";" : "", sources.size() + j);
  }
  target += "&annotations=distance";
  return target;
}

std::vector<double> table_request(const ProviderSpec& spec,
                                  TableTransport& transport,
                                  std::span<const GeoPoint> sources,
                                  std::span<const GeoPoint> destinations) {
  const std::string target = table_target(spec, sources, destinations);
  HttpResult res;
  for (int attempt = 1;; ++attempt) {
    res = transport.get(target);
    if (res.transport_ok || attempt >= spec.max_attempts) break;
    const double delay = spec.retry_base_delay * std::ldexp(1.0, attempt - 1);
    std::this_thread::sleep_for(std::chrono::duration<double>(delay));
  }
  if (!res.transport_ok) {
    fail(fmt::format("table request failed after {} attempts: {}",
                     spec.max_attempts, res.error));
  }
  if (res.status != 200) {
    fail(fmt::format("table request returned HTTP {}: {}", res.status,
                     res.body.substr(0, 200)));
  }

  json doc;
  try {
    doc = json::parse(res.body);
  } catch (const json::exception& e) {
    fail(fmt::format("table response is not JSON: {}", e.what()));
  }
  if (doc.contains("code") && doc["code"] != "Ok") {
    fail(fmt::format("table service error {}: {}", doc["code"].dump(),
                     doc.value("message", std::string())));
  }
  if (!doc.contains("distances") || !doc["distances"].is_array()) {
    fail("table response lacks a distances array");
  }
  const auto& rows = doc["distances"];
  if (rows.size() != sources.size()) {
    fail(fmt::format("table response has {} rows, expected {}", rows.size(),
                     sources.size()));
  }
  std::vector<double> block(sources.size() * destinations.size());
  std::vector<std::pair<std::size_t, std::size_t>> unreachable;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r].is_array() || rows[r].size() != destinations.size()) {
      fail(fmt::format("table response row {} has the wrong length", r));
    }
    for (std::size_t c = 0; c < destinations.size(); ++c) {
      const auto& cell = rows[r][c];
      if (cell.is_null()) {
        unreachable.emplace_back(r, c);
      } else if (cell.is_number()) {
        block[r * destinations.size() + c] = cell.get<double>();
      } else {
        fail(fmt::format("table response cell ({}, {}) is not a number", r, c));
      }
    }
  }
  if (!unreachable.empty()) throw UnreachableError(std::move(unreachable));
  return block;
}

std::vector<double> table_request(const ProviderSpec& spec,
                                  std::span<const GeoPoint> sources,
                                  std::span<const GeoPoint> destinations) {
  validate(spec);
  auto transport = make_transport(spec);
  return table_request(spec, *transport, sources, destinations);
}

DistanceMatrix build_matrix(const ProviderSpec& spec,
                            std::span<const GeoPoint> sources,
                            std::span<const GeoPoint> destinations,
                            const TransportFactory& factory) {
  validate(spec);
  if (sources.empty() || destinations.empty()) {
    throw Error(ErrorKind::InvalidArgument,
                "distance matrix needs nonempty sources and destinations");
  }
  for (const auto* list : {&sources, &destinations}) {
    for (const auto& p : *list) {
      if (!is_valid(p)) {
        throw Error(ErrorKind::InvalidArgument,
                    fmt::format("invalid coordinate ({}, {})", p.lat, p.lon));
      }
    }
  }
  const std::size_t rows = sources.size();
  const std::size_t cols = destinations.size();
  const bool same = std::equal(sources.begin(), sources.end(),
                               destinations.begin(), destinations.end());
  std::vector<double> values(rows * cols);

  if (spec.kind == ProviderKind::GreatCircle) {
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        values[r * cols + c] =
            great_circle(sources[r], destinations[c], spec.earth_radius);
      }
    }
  } else {
    const std::size_t tile_rows = spec.chunk_size / 2;
    const std::size_t tile_cols = spec.chunk_size - tile_rows;
    struct Tile {
      std::size_t r0, nr, c0, nc;
    };
    std::vector<Tile> tiles;
    for (std::size_t r0 = 0; r0 < rows; r0 += tile_rows) {
      for (std::size_t c0 = 0; c0 < cols; c0 += tile_cols) {
        tiles.push_back({r0, std::min(tile_rows, rows - r0), c0,
                         std::min(tile_cols, cols - c0)});
      }
    }

    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::vector<std::pair<std::size_t, std::size_t>> unreachable;
    std::vector<std::exception_ptr> errors(tiles.size());
    std::exception_ptr setup_error;

    auto worker = [&] {
      std::unique_ptr<TableTransport> transport;
      try {
        transport = factory(spec);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!setup_error) setup_error = std::current_exception();
        return;
      }
      for (std::size_t t; (t = next.fetch_add(1)) < tiles.size();) {
        const Tile& tile = tiles[t];
        try {
          auto block = table_request(spec, *transport,
                                     sources.subspan(tile.r0, tile.nr),
                                     destinations.subspan(tile.c0, tile.nc));
          for (std::size_t r = 0; r < tile.nr; ++r) {
            std::copy_n(block.begin() + r * tile.nc, tile.nc,
                        values.begin() + (tile.r0 + r) * cols + tile.c0);
          }
        } catch (const UnreachableError& e) {
          std::lock_guard lock(mu);
          for (auto [r, c] : e.pairs()) {
            unreachable.emplace_back(tile.r0 + r, tile.c0 + c);
          }
        } catch (...) {
          errors[t] = std::current_exception();
        }
      }
    };

    const std::size_t workers = std::min(spec.max_in_flight, tiles.size());
    if (workers <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    if (setup_error) std::rethrow_exception(setup_error);
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    if (!unreachable.empty()) {
      std::sort(unreachable.begin(), unreachable.end());
      throw UnreachableError(std::move(unreachable));
    }
  }

  if (same) {
    for (std::size_t i = 0; i < rows; ++i) values[i * cols + i] = 0.0;
  }
  return DistanceMatrix({sources.begin(), sources.end()},
                        {destinations.begin(), destinations.end()},
                        std::move(values), provider_tag(spec),
                        current_timestamp());
}

std::string current_timestamp() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long v = std::strtoll(epoch, &end, 10);
    if (end && *end == '\0' && end != epoch) now = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace foodloc::distance
