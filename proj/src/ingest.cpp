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
#include "foodloc/ingest.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <numeric>

#include "csv.hpp"
#include "foodloc/error.hpp"
#include "foodloc/rng.hpp"

namespace foodloc::ingest {

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw Error(ErrorKind::Ingest, message);
}

std::optional<std::size_t> find_column(const std::vector<std::string>& header,
                                       const std::string& name,
                                       bool required,
                                       const std::filesystem::path& path) {
  if (name.empty()) return std::nullopt;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (csv::trim(header[i]) == name) return i;
  }
  if (required) {
    fail(fmt::format("{}: missing column '{}'", path.string(), name));
  }
  return std::nullopt;
}

}  // namespace

void validate(const IngestConfig& config) {
  if (config.sample_size && *config.sample_size < 1) {
    throw Error(ErrorKind::InvalidArgument, "sample_size must be at least 1");
  }
  if (!(config.weight_cap >= 1.25)) {
    throw Error(ErrorKind::InvalidArgument, "weight_cap must be >= 1.25");
  }
  if (!(config.weight_numerator > 0.0) || !std::isfinite(config.weight_numerator)) {
    throw Error(ErrorKind::InvalidArgument, "weight_numerator must be positive");
  }
  if (!(config.income_cap >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "income_cap must be nonnegative");
  }
}

std::vector<Household> load_households(const std::filesystem::path& path,
                                       const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(fmt::format("{}: cannot open household file", path.string()));

  std::vector<std::string> header;
  std::size_t line = 1;
  if (!csv::read_record(in, header, line)) {
    fail(fmt::format("{}: empty file, header row required", path.string()));
  }
  if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) {
    header[0].erase(0, 3);
  }

  const auto lat_col = *find_column(header, schema.lat_column, true, path);
  const auto lon_col = *find_column(header, schema.lon_column, true, path);
  const auto id_col = find_column(header, schema.id_column, true, path);
  const auto income_col = find_column(header, schema.income_column, true, path);
  const auto weight_col = find_column(header, schema.weight_column, true, path);
  const auto origin_col = find_column(header, schema.origin_column, true, path);
  const auto city_col = find_column(header, schema.city_column, true, path);

  std::vector<Household> out;
  std::vector<std::string> fields;
  std::size_t row_line = line;
  while (csv::read_record(in, fields, line)) {
    const std::size_t this_line = row_line;
    row_line = line;
    if (fields.size() == 1 && csv::trim(fields[0]).empty()) continue;
    if (fields.size() != header.size()) {
      fail(fmt::format("{}:{}: expected {} fields, found {}", path.string(),
                       this_line, header.size(), fields.size()));
    }
    auto number = [&](std::size_t col, const std::string& name) {
      auto v = csv::parse_double(fields[col]);
      if (!v || !std::isfinite(*v)) {
        fail(fmt::format("{}:{}: cannot parse {} value '{}'", path.string(),
                         this_line, name, fields[col]));
      }
      return *v;
    };

    Household h;
    h.location.lat = number(lat_col, "latitude");
    h.location.lon = number(lon_col, "longitude");
    if (h.location.lat < -90.0 || h.location.lat > 90.0) {
      fail(fmt::format("{}:{}: latitude {} out of range [-90, 90]",
                       path.string(), this_line, h.location.lat));
    }
    if (h.location.lon < -180.0 || h.location.lon > 180.0) {
      fail(fmt::format("{}:{}: longitude {} out of range [-180, 180]",
                       path.string(), this_line, h.location.lon));
    }
    h.id = id_col ? std::string(csv::trim(fields[*id_col]))
                  : std::to_string(out.size());
    if (income_col && !csv::trim(fields[*income_col]).empty()) {
      const double income = number(*income_col, "income");
      if (income < 0.0) {
        fail(fmt::format("{}:{}: negative income {}", path.string(), this_line,
                         income));
      }
      h.income = income;
    }
    if (weight_col && !csv::trim(fields[*weight_col]).empty()) {
      h.weight = number(*weight_col, "weight");
      if (!(h.weight > 0.0)) {
        fail(fmt::format("{}:{}: weight must be positive", path.string(),
                         this_line));
      }
    }
    h.origin_id = origin_col && !csv::trim(fields[*origin_col]).empty()
                      ? std::string(csv::trim(fields[*origin_col]))
                      : h.id;
    if (city_col && !csv::trim(fields[*city_col]).empty()) {
      h.city = std::string(csv::trim(fields[*city_col]));
    }
    out.push_back(std::move(h));
  }
  return out;
}

void save_households(const std::filesystem::path& path,
                     std::span<const Household> households) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::Io, fmt::format("{}: cannot write", path.string()));
  }
  out << "id,lat,lon,income,weight,origin_id,city\n";
  for (const auto& h : households) {
    out << csv::quote(h.id) << ',' << fmt::format("{}", h.location.lat) << ','
        << fmt::format("{}", h.location.lon) << ','
        << (h.income ? fmt::format("{}", *h.income) : std::string()) << ','
        << fmt::format("{}", h.weight) << ',' << csv::quote(h.origin_id) << ','
        << (h.city ? csv::quote(*h.city) : std::string()) << '\n';
  }
  if (!out) {
    throw Error(ErrorKind::Io, fmt::format("{}: write failed", path.string()));
  }
}

CsvSchema prepared_schema() {
  return CsvSchema{.id_column = "id",
                   .lat_column = "lat",
                   .lon_column = "lon",
                   .income_column = "income",
                   .weight_column = "weight",
                   .origin_column = "origin_id",
                   .city_column = "city"};
}

std::vector<Household> filter_by_income(std::span<const Household> households,
                                        double cap) {
  std::vector<Household> out;
  for (const auto& h : households) {
    if (!h.income || *h.income <= cap) out.push_back(h);
  }
  return out;
}

std::vector<Household> sample(std::span<const Household> households,
                              std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "sample size must be >= 1");
  if (n >= households.size()) {
    return {households.begin(), households.end()};
  }
  std::vector<std::size_t> order(households.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(seed);
  partial_shuffle(std::span<std::size_t>(order), n, rng);
  std::vector<Household> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(households[order[i]]);
  return out;
}

double compute_weight(double income, double numerator, double weight_cap) {
  if (!(income > 0.0) || !std::isfinite(income)) {
    throw Error(ErrorKind::Ingest,
                fmt::format("degenerate income {} cannot be weighted", income));
  }
  return std::min(numerator / (income / 10000.0), weight_cap);
}

std::vector<Household> apply_income_weights(
    std::span<const Household> households, double numerator,
    double weight_cap) {
  std::vector<Household> out(households.begin(), households.end());
  for (auto& h : out) {
    if (!h.income) {
      h.weight = 1.0;
      continue;
    }
    try {
      h.weight = compute_weight(*h.income, numerator, weight_cap);
    } catch (const Error& e) {
      fail(fmt::format("household '{}': {}", h.id, e.what()));
    }
  }
  return out;
}

std::size_t copy_count(double weight) {
  const double r = std::round(weight);
  return r < 1.0 ? 1 : static_cast<std::size_t>(r);
}

std::vector<Household> duplicate_by_weight(
    std::span<const Household> households) {
  std::vector<Household> out;
  for (const auto& h : households) {
    if (!(h.weight > 0.0)) {
      throw Error(ErrorKind::InvalidArgument,
                  fmt::format("household '{}' has nonpositive weight", h.id));
    }
    const std::size_t copies = copy_count(h.weight);
    for (std::size_t c = 0; c < copies; ++c) {
      Household copy = h;
      copy.weight = 1.0;
      if (copies > 1) copy.id = fmt::format("{}#{}", h.id, c);
      out.push_back(std::move(copy));
    }
  }
  return out;
}

std::vector<Household> prepare(std::span<const Household> households,
                               const IngestConfig& config) {
  validate(config);
  auto kept = filter_by_income(households, config.income_cap);
  if (config.sample_size) kept = sample(kept, *config.sample_size, config.seed);
  switch (config.weighting_mode) {
    case WeightingMode::None:
      return kept;
    case WeightingMode::Direct:
      return apply_income_weights(kept, config.weight_numerator,
                                  config.weight_cap);
    case WeightingMode::Duplicate:
      return duplicate_by_weight(apply_income_weights(
          kept, config.weight_numerator, config.weight_cap));
  }
  return kept;
}

std::vector<GeoPoint> locations(std::span<const Household> households) {
  std::vector<GeoPoint> out;
  out.reserve(households.size());
  for (const auto& h : households) out.push_back(h.location);
  return out;
}

std::vector<double> weights(std::span<const Household> households) {
  std::vector<double> out;
  out.reserve(households.size());
  for (const auto& h : households) out.push_back(h.weight);
  return out;
}

}  // namespace foodloc::ingest
