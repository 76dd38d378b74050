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
#include "foodloc/io.hpp"

#include <fmt/format.h>
#include <fstream>
#include <iterator>

#include "csv.hpp"
#include "foodloc/error.hpp"

namespace foodloc::io {

using nlohmann::json;

namespace {

const ingest::Household& at(std::span<const ingest::Household> households,
                            std::size_t i) {
  if (i >= households.size()) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("household index {} outside the dataset", i));
  }
  return households[i];
}

json point_feature(const GeoPoint& p, json properties) {
  return {{"type", "Feature"},
          {"geometry", {{"type", "Point"}, {"coordinates", {p.lon, p.lat}}}},
          {"properties", std::move(properties)}};
}

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json plan_to_json(const hierarchy::PlacementPlan& plan,
                  std::span<const ingest::Household> households,
                  const json& metadata) {
  json banks = json::array();
  for (auto b : plan.banks) {
    const auto& h = at(households, b);
    banks.push_back({{"index", b}, {"id", h.id}, {"lat", h.location.lat},
                     {"lon", h.location.lon}});
  }
  json pantries = json::array();
  for (std::size_t p = 0; p < plan.pantries.size(); ++p) {
    const auto& h = at(households, plan.pantries[p]);
    const auto bank = plan.pantry_to_bank[p];
    pantries.push_back({{"index", plan.pantries[p]},
                        {"id", h.id},
                        {"lat", h.location.lat},
                        {"lon", h.location.lon},
                        {"bank_index", bank},
                        {"bank_id", at(households, bank).id}});
  }
  return {
      {"metadata", metadata},
      {"household_count", households.size()},
      {"banks", banks},
      {"pantries", pantries},
      {"household_to_bank", plan.household_to_bank},
      {"household_to_pantry", plan.household_to_pantry},
      {"level1_objective_m", plan.level1_objective},
      {"level2_objective_m", plan.level2_objective},
      {"solver", {{"level1_passes", plan.level1_passes},
                  {"level2_passes", plan.level2_passes}}},
  };
}

hierarchy::PlacementPlan plan_from_json(const json& doc) {
  try {
    hierarchy::PlacementPlan plan;
    for (const auto& b : doc.at("banks")) {
      plan.banks.push_back(b.at("index").get<std::size_t>());
    }
    for (const auto& p : doc.at("pantries")) {
      plan.pantries.push_back(p.at("index").get<std::size_t>());
      plan.pantry_to_bank.push_back(p.at("bank_index").get<std::size_t>());
    }
    plan.household_to_bank =
        doc.at("household_to_bank").get<std::vector<std::size_t>>();
    plan.household_to_pantry =
        doc.at("household_to_pantry").get<std::vector<std::size_t>>();
    plan.level1_objective = doc.at("level1_objective_m").get<double>();
    plan.level2_objective = doc.at("level2_objective_m").get<double>();
    const auto& solver = doc.at("solver");
    plan.level1_passes = solver.at("level1_passes").get<std::size_t>();
    plan.level2_passes =
        solver.at("level2_passes").get<std::vector<std::size_t>>();
    return plan;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Format, fmt::format("malformed plan: {}", e.what()));
  }
}

json plan_to_geojson(const hierarchy::PlacementPlan& plan,
                     std::span<const ingest::Household> households,
                     const json& metadata) {
  json features = json::array();
  for (auto b : plan.banks) {
    const auto& h = at(households, b);
    features.push_back(point_feature(
        h.location, {{"role", "bank"}, {"id", h.id}, {"index", b}}));
  }
  for (std::size_t p = 0; p < plan.pantries.size(); ++p) {
    const auto& h = at(households, plan.pantries[p]);
    features.push_back(point_feature(
        h.location, {{"role", "pantry"},
                     {"id", h.id},
                     {"index", plan.pantries[p]},
                     {"bank_id", at(households, plan.pantry_to_bank[p]).id}}));
  }
  return {{"type", "FeatureCollection"},
          {"metadata", metadata},
          {"features", features}};
}

json report_to_json(const evaluate::EvaluationReport& report,
                    const json& metadata) {
  json groups = json::array();
  for (const auto& g : report.groups) {
    groups.push_back({{"group", g.group},
                      {"household_count", g.household_count},
                      {"total_weight", g.total_weight},
                      {"candidate_avg_mi", g.candidate_avg},
                      {"baseline_avg_mi", g.baseline_avg},
                      {"saving_abs_mi", g.saving_abs},
                      {"saving_pct", optional_number(g.saving_pct)},
                      {"candidate_total_mi", g.candidate_total},
                      {"baseline_total_mi", g.baseline_total}});
  }
  json doc = {{"metadata", metadata},
              {"candidate_label", report.candidate_label},
              {"baseline_label", report.baseline_label},
              {"groups", groups},
              {"penalty", nullptr}};
  if (report.penalty) {
    const auto& p = *report.penalty;
    doc["penalty"] = {{"candidate_pantries", p.candidate_pantries},
                      {"baseline_pantries", p.baseline_pantries},
                      {"candidate_avg_mi", p.candidate_avg},
                      {"baseline_avg_mi", p.baseline_avg},
                      {"candidate_total_mi", p.candidate_total},
                      {"baseline_total_mi", p.baseline_total},
                      {"per_pantry_avg_mi", p.per_pantry_avg},
                      {"total_mi", p.total}};
  }
  return doc;
}

std::string report_to_csv(const evaluate::EvaluationReport& report) {
  std::string out =
      "group,household_count,candidate_avg_mi,baseline_avg_mi,saving_mi,"
      "saving_pct,candidate_total_mi,baseline_total_mi\n";
  for (const auto& g : report.groups) {
    out += fmt::format("{},{},{:.2f},{:.2f},{:.2f},{},{:.2f},{:.2f}\n",
                       csv::quote(g.group), g.household_count, g.candidate_avg,
                       g.baseline_avg, g.saving_abs,
                       g.saving_pct ? fmt::format("{:.1f}", *g.saving_pct)
                                    : std::string(),
                       g.candidate_total, g.baseline_total);
  }
  return out;
}

json households_to_geojson(std::span<const ingest::Household> households,
                           std::span<const double> candidate_meters,
                           std::span<const double> baseline_meters,
                           const evaluate::EvaluationReport& report,
                           const json& metadata) {
  if (candidate_meters.size() != households.size() ||
      baseline_meters.size() != households.size()) {
    throw Error(ErrorKind::InvalidArgument,
                "distance lists must cover every household");
  }
  json features = json::array();
  for (std::size_t i = 0; i < households.size(); ++i) {
    const double c = candidate_meters[i];
    const double b = baseline_meters[i];
    const std::string closer =
        c < b ? report.candidate_label : (b < c ? report.baseline_label : "tie");
    features.push_back(point_feature(households[i].location,
                                     {{"id", households[i].id},
                                      {"candidate_m", c},
                                      {"baseline_m", b},
                                      {"closer", closer}}));
  }
  return {{"type", "FeatureCollection"},
          {"metadata", metadata},
          {"features", features}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, fmt::format("{}: cannot write", path.string()));
  out << text;
  if (!out) throw Error(ErrorKind::Io, fmt::format("{}: write failed", path.string()));
}

void write_json(const std::filesystem::path& path, const json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, fmt::format("{}: cannot open", path.string()));
  try {
    return json::parse(std::string((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>()));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Format,
                fmt::format("{}: invalid JSON: {}", path.string(), e.what()));
  }
}

}  // namespace foodloc::io
