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

#include <filesystem>
#include <span>

#include <json.hpp>

#include "foodloc/evaluate.hpp"
#include "foodloc/hierarchy.hpp"
#include "foodloc/ingest.hpp"

// File formats for placement plans and evaluation reports. Every writer
// takes a metadata object (seed, config hash, ...) that is embedded as-is.
namespace foodloc::io {

nlohmann::json plan_to_json(const hierarchy::PlacementPlan& plan,
                            std::span<const ingest::Household> households,
                            const nlohmann::json& metadata);
hierarchy::PlacementPlan plan_from_json(const nlohmann::json& doc);

/// FeatureCollection of banks and pantries (role=bank|pantry; pantries
/// carry bank_id).
nlohmann::json plan_to_geojson(const hierarchy::PlacementPlan& plan,
                               std::span<const ingest::Household> households,
                               const nlohmann::json& metadata);

nlohmann::json report_to_json(const evaluate::EvaluationReport& report,
                              const nlohmann::json& metadata);

/// One row per group plus overall; miles to 2 decimals, percent to 1.
std::string report_to_csv(const evaluate::EvaluationReport& report);

/// Households with nearest candidate/baseline distances and which is closer.
nlohmann::json households_to_geojson(
    std::span<const ingest::Household> households,
    std::span<const double> candidate_meters,
    std::span<const double> baseline_meters,
    const evaluate::EvaluationReport& report, const nlohmann::json& metadata);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace foodloc::io
