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
#include "foodloc/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <map>

#include "csv.hpp"
#include "foodloc/error.hpp"

namespace foodloc::evaluate {

using distance::DistanceMatrix;

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw Error(ErrorKind::Evaluate, message);
}

struct Accumulator {
  double sum = 0.0;
  double compensation = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      compensation += (sum - t) + v;
    } else {
      compensation += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + compensation; }
};

}  // namespace

double compensated_sum(std::span<const double> values) {
  Accumulator acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

void validate(const FacilitySet& set) {
  if (set.points.empty()) fail(fmt::format("facility set '{}' is empty", set.label));
  if (set.ids.size() != set.points.size() ||
      set.city.size() != set.points.size()) {
    fail(fmt::format("facility set '{}' has inconsistent columns", set.label));
  }
  for (const auto& p : set.points) {
    if (!is_valid(p)) {
      fail(fmt::format("facility set '{}' has invalid coordinate ({}, {})",
                       set.label, p.lat, p.lon));
    }
  }
}

FacilitySet load_facilities(const std::filesystem::path& path,
                            std::string label) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(fmt::format("{}: cannot open facility file", path.string()));
  std::vector<std::string> header;
  std::vector<std::string> fields;
  std::size_t line = 1;
  if (!csv::read_record(in, header, line)) {
    fail(fmt::format("{}: empty facility file", path.string()));
  }
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (csv::trim(header[i]) == name) return i;
    }
    return std::nullopt;
  };
  const auto lat = column("lat");
  const auto lon = column("lon");
  if (!lat || !lon) {
    fail(fmt::format("{}: facility file needs lat and lon columns", path.string()));
  }
  const auto id = column("id");
  const auto city = column("city");

  FacilitySet set;
  set.label = std::move(label);
  std::size_t row_line = line;
  while (csv::read_record(in, fields, line)) {
    const std::size_t this_line = row_line;
    row_line = line;
    if (fields.size() == 1 && csv::trim(fields[0]).empty()) continue;
    if (fields.size() != header.size()) {
      fail(fmt::format("{}:{}: expected {} fields, found {}", path.string(),
                       this_line, header.size(), fields.size()));
    }
    const auto la = csv::parse_double(fields[*lat]);
    const auto lo = csv::parse_double(fields[*lon]);
    if (!la || !lo || !is_valid(GeoPoint{*la, *lo})) {
      fail(fmt::format("{}:{}: invalid coordinate", path.string(), this_line));
    }
    set.points.push_back(GeoPoint{*la, *lo});
    set.ids.push_back(id ? std::string(csv::trim(fields[*id]))
                         : std::to_string(set.points.size() - 1));
    if (city && !csv::trim(fields[*city]).empty()) {
      set.city.emplace_back(std::string(csv::trim(fields[*city])));
    } else {
      set.city.emplace_back();
    }
  }
  validate(set);
  return set;
}

namespace {

FacilitySet facilities_at(std::span<const std::size_t> indices,
                          std::span<const ingest::Household> households,
                          std::string label) {
  FacilitySet set;
  set.label = std::move(label);
  for (auto i : indices) {
    if (i >= households.size()) fail("plan refers to a missing household");
    set.ids.push_back(households[i].id);
    set.points.push_back(households[i].location);
    set.city.push_back(households[i].city);
  }
  return set;
}

}  // namespace

FacilitySet plan_pantries(const hierarchy::PlacementPlan& plan,
                          std::span<const ingest::Household> households,
                          std::string label) {
  return facilities_at(plan.pantries, households, std::move(label));
}

FacilitySet plan_banks(const hierarchy::PlacementPlan& plan,
                       std::span<const ingest::Household> households,
                       std::string label) {
  return facilities_at(plan.banks, households, std::move(label));
}

std::vector<std::optional<std::string>> household_groups(
    std::span<const ingest::Household> households,
    std::span<const CityBox> boxes) {
  std::vector<std::optional<std::string>> out;
  out.reserve(households.size());
  for (const auto& h : households) {
    if (h.city) {
      out.push_back(h.city);
      continue;
    }
    std::optional<std::string> group;
    for (const auto& b : boxes) {
      if (h.location.lat >= b.min_lat && h.location.lat <= b.max_lat &&
          h.location.lon >= b.min_lon && h.location.lon <= b.max_lon) {
        group = b.name;
        break;
      }
    }
    out.push_back(std::move(group));
  }
  return out;
}

NearestStats nearest_facility_stats(const DistanceMatrix& to_facilities,
                                    std::span<const double> weights) {
  const std::size_t n = to_facilities.rows();
  if (n == 0 || to_facilities.cols() == 0) {
    fail("nearest-facility statistics need households and facilities");
  }
  if (!weights.empty() && weights.size() != n) {
    fail(fmt::format("expected {} weights, got {}", n, weights.size()));
  }
  NearestStats stats;
  stats.per_household.resize(n);
  stats.nearest.resize(n);
  Accumulator total;
  Accumulator weight;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = to_facilities.row(i);
    const auto it = std::min_element(row.begin(), row.end());
    stats.nearest[i] = static_cast<std::size_t>(it - row.begin());
    stats.per_household[i] = *it;
    const double w = weights.empty() ? 1.0 : weights[i];
    total.add(w * *it);
    weight.add(w);
  }
  stats.total = total.value();
  stats.total_weight = weight.value();
  stats.mean = stats.total / stats.total_weight;
  return stats;
}

NearestStats nearest_facility_stats(
    std::span<const ingest::Household> households,
    const FacilitySet& facilities, const distance::ProviderSpec& provider,
    bool use_weights) {
  validate(facilities);
  const auto points = ingest::locations(households);
  const auto matrix =
      distance::build_matrix(provider, points, facilities.points);
  const auto w = ingest::weights(households);
  return nearest_facility_stats(matrix, use_weights ? std::span<const double>(w)
                                                    : std::span<const double>());
}

GroupStats make_group(std::string group, std::size_t household_count,
                      double total_weight, double candidate_avg,
                      double baseline_avg, double candidate_total,
                      double baseline_total) {
  GroupStats g;
  g.group = std::move(group);
  g.household_count = household_count;
  g.total_weight = total_weight;
  g.candidate_avg = candidate_avg;
  g.baseline_avg = baseline_avg;
  g.saving_abs = baseline_avg - candidate_avg;
  if (baseline_avg > 0.0) g.saving_pct = 100.0 * g.saving_abs / baseline_avg;
  g.candidate_total = candidate_total;
  g.baseline_total = baseline_total;
  return g;
}

EvaluationReport compare(const DistanceMatrix& to_candidate,
                         const DistanceMatrix& to_baseline,
                         std::span<const std::optional<std::string>> groups,
                         std::span<const double> weights,
                         std::string candidate_label,
                         std::string baseline_label) {
  const std::size_t n = to_candidate.rows();
  if (to_baseline.rows() != n) {
    fail("candidate and baseline matrices cover different households");
  }
  if (!groups.empty() && groups.size() != n) {
    fail("group tags must cover every household");
  }
  const auto cand = nearest_facility_stats(to_candidate, weights);
  const auto base = nearest_facility_stats(to_baseline, weights);

  struct Sums {
    std::size_t count = 0;
    Accumulator weight, cand, base;
  };
  std::map<std::string, Sums> by_city;
  Sums overall;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    auto add = [&](Sums& s) {
      ++s.count;
      s.weight.add(w);
      s.cand.add(w * cand.per_household[i]);
      s.base.add(w * base.per_household[i]);
    };
    add(overall);
    if (!groups.empty() && groups[i]) add(by_city[*groups[i]]);
  }

  EvaluationReport report;
  report.candidate_label = std::move(candidate_label);
  report.baseline_label = std::move(baseline_label);
  auto emit = [&](const std::string& name, const Sums& s) {
    const double weight = s.weight.value();
    const double ct = meters_to_miles(s.cand.value());
    const double bt = meters_to_miles(s.base.value());
    report.groups.push_back(
        make_group(name, s.count, weight, ct / weight, bt / weight, ct, bt));
  };
  for (const auto& [name, sums] : by_city) emit(name, sums);
  emit("overall", overall);
  return report;
}

EvaluationReport compare(const FacilitySet& candidate,
                         const FacilitySet& baseline,
                         std::span<const ingest::Household> households,
                         const distance::ProviderSpec& provider,
                         std::span<const CityBox> boxes, bool use_weights) {
  validate(candidate);
  validate(baseline);
  if (households.empty()) fail("no households to evaluate");
  const auto points = ingest::locations(households);
  const auto to_candidate =
      distance::build_matrix(provider, points, candidate.points);
  const auto to_baseline =
      distance::build_matrix(provider, points, baseline.points);
  const auto groups = household_groups(households, boxes);
  const auto w = ingest::weights(households);
  return compare(to_candidate, to_baseline, groups,
                 use_weights ? std::span<const double>(w)
                             : std::span<const double>(),
                 candidate.label, baseline.label);
}

PenaltyBlock penalty_from(std::span<const double> candidate_meters,
                          const DistanceMatrix& baseline_pantry_to_bank) {
  if (candidate_meters.empty() || baseline_pantry_to_bank.rows() == 0) {
    fail("penalty needs candidate and baseline pantries");
  }
  const auto base = nearest_facility_stats(baseline_pantry_to_bank);
  PenaltyBlock p;
  p.candidate_pantries = candidate_meters.size();
  p.baseline_pantries = baseline_pantry_to_bank.rows();
  p.candidate_total = meters_to_miles(compensated_sum(candidate_meters));
  p.baseline_total = meters_to_miles(base.total);
  p.candidate_avg = p.candidate_total / static_cast<double>(p.candidate_pantries);
  p.baseline_avg = p.baseline_total / static_cast<double>(p.baseline_pantries);
  p.per_pantry_avg = p.candidate_avg - p.baseline_avg;
  p.total = p.candidate_total - p.baseline_total;
  return p;
}

PenaltyBlock penalty_report(const hierarchy::PlacementPlan& candidate_plan,
                            std::span<const ingest::Household> households,
                            const FacilitySet& baseline_banks,
                            const FacilitySet& baseline_pantries,
                            const distance::ProviderSpec& provider) {
  validate(baseline_banks);
  validate(baseline_pantries);
  const auto pantries = plan_pantries(candidate_plan, households, "candidate");
  const auto banks = plan_banks(candidate_plan, households, "candidate");
  const auto cand_matrix =
      distance::build_matrix(provider, pantries.points, banks.points);

  std::vector<double> cand(candidate_plan.pantries.size());
  for (std::size_t p = 0; p < cand.size(); ++p) {
    const auto bank = std::lower_bound(candidate_plan.banks.begin(),
                                       candidate_plan.banks.end(),
                                       candidate_plan.pantry_to_bank[p]);
    if (bank == candidate_plan.banks.end() ||
        *bank != candidate_plan.pantry_to_bank[p]) {
      fail("plan maps a pantry to an unknown bank");
    }
    const auto col = static_cast<std::size_t>(bank - candidate_plan.banks.begin());
    cand[p] = candidate_plan.pantries[p] == *bank ? 0.0 : cand_matrix(p, col);
  }
  const auto base_matrix = distance::build_matrix(
      provider, baseline_pantries.points, baseline_banks.points);
  return penalty_from(cand, base_matrix);
}

}  // namespace foodloc::evaluate
