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
#include <doctest.h>

#include <cstdlib>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "test_util.hpp"

#ifndef FOODLOC_CLI
#error "FOODLOC_CLI must name the CLI binary"
#endif

namespace {

struct Result {
  int code = -1;
  std::string out;
};

// Runs the CLI inside `dir`; stdout and stderr are captured together.
Result run(const TempDir& dir, const std::string& args) {
  const auto log = dir / "cli.log";
  const std::string cmd = "cd '" + dir.path().string() + "' && SOURCE_DATE_EPOCH=1700000000 '" +
                          std::string(FOODLOC_CLI) + "' " + args + " > '" + log.string() +
                          "' 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

void write_config(const TempDir& dir, const nlohmann::json& extra = {}) {
  nlohmann::json cfg = {
      {"seed", 3},
      {"synth", {{"clusters", 2}, {"points_per_cluster", 12}, {"output", "hh.csv"}}},
      {"dataset", {{"path", "hh.csv"}, {"schema", {{"income", "income"}, {"city", "city"}}}}},
      {"ingest", {{"weighting_mode", "duplicate"}}},
      {"hierarchy", {{"k_banks", 2}, {"k_pantries_total", 4}}},
      {"baseline", {{"pantries", "bp.csv"}, {"banks", "bb.csv"}}}};
  if (extra.is_object()) cfg.merge_patch(extra);
  dir.write("cfg.json", cfg.dump(2));
  dir.write("bp.csv", "id,lat,lon\np1,35.0,-120.0\np2,36.0,-121.0\np3,35.5,-119.5\n");
  dir.write("bb.csv", "id,lat,lon\nb1,35.2,-120.2\nb2,36.1,-120.9\n");
}

Result pipeline(const TempDir& dir) {
  for (const char* stage : {"synth", "ingest", "matrix", "place", "evaluate"}) {
    auto r = run(dir, std::string("--config cfg.json ") + stage);
    if (r.code != 0) return r;
  }
  return {0, ""};
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  TempDir dir;
  CHECK(run(dir, "").code == 1);
  CHECK(run(dir, "frobnicate").code == 1);
  CHECK(run(dir, "--config missing.json ingest").code == 1);
  dir.write("bad.json", "{not json");
  CHECK(run(dir, "--config bad.json ingest").code == 1);
  write_config(dir);
  CHECK(run(dir, "--config cfg.json ingest --weighting sideways").code == 1);
  CHECK(run(dir, "--config cfg.json matrix --provider carrier-pigeon").code == 1);
  CHECK(run(dir, "--help").code == 0);
}

TEST_CASE("stage failures map to their exit codes") {
  TempDir dir;
  write_config(dir);
  CHECK(run(dir, "--config cfg.json ingest").code == 2);  // dataset missing
  dir.write("hh.csv", "lat,lon,income,city\n34,-118,1000,a\n95,0,1000,a\n");
  const auto bad = run(dir, "--config cfg.json ingest");
  CHECK(bad.code == 2);
  CHECK(bad.out.find("latitude") != std::string::npos);

  REQUIRE(run(dir, "--config cfg.json synth").code == 0);
  REQUIRE(run(dir, "--config cfg.json ingest").code == 0);
  const auto replay = fixture("table_la3.json").string();
  CHECK(run(dir, "--config cfg.json matrix --provider table_api --replay '" + replay + "'").code ==
        3);
  REQUIRE(run(dir, "--config cfg.json matrix").code == 0);
  CHECK(run(dir, "--config cfg.json place --k-pantries 100000").code == 4);
  REQUIRE(run(dir, "--config cfg.json place").code == 0);
  CHECK(run(dir, "--config cfg.json evaluate --baseline-pantries nope.csv").code == 5);
}

TEST_CASE("full pipeline writes its outputs") {
  TempDir dir;
  write_config(dir);
  const auto r = pipeline(dir);
  REQUIRE_MESSAGE(r.code == 0, r.out);
  for (const char* f : {"households.csv", "households.csv.meta.json", "matrix.dmat",
                        "matrix.dmat.meta.json", "plan.json", "plan.geojson", "report.json",
                        "report.csv", "report.csv.meta.json", "households.geojson"}) {
    CHECK_MESSAGE(std::filesystem::exists(dir / ("out/" + std::string(f))), f);
  }
  const auto plan = nlohmann::json::parse(slurp(dir / "out/plan.json"));
  CHECK(plan["banks"].size() == 2);
  CHECK(plan["pantries"].size() == 4);
  CHECK(plan["metadata"]["seed"] == 3);
  const auto report = nlohmann::json::parse(slurp(dir / "out/report.json"));
  CHECK(report["groups"].back()["group"] == "overall");
  CHECK(report["penalty"].is_object());
  const auto meta = nlohmann::json::parse(slurp(dir / "out/matrix.dmat.meta.json"));
  CHECK(meta["stage"] == "matrix");
  CHECK(meta["config_hash"].get<std::string>().size() == 8);
}

TEST_CASE("matrix cache is reused until forced") {
  TempDir dir;
  write_config(dir);
  REQUIRE(run(dir, "--config cfg.json synth").code == 0);
  REQUIRE(run(dir, "--config cfg.json ingest").code == 0);
  const auto first = run(dir, "--config cfg.json matrix");
  REQUIRE(first.code == 0);
  CHECK(first.out.find("cache hit") == std::string::npos);
  const auto second = run(dir, "--config cfg.json matrix");
  CHECK(second.out.find("cache hit") != std::string::npos);
  const auto forced = run(dir, "--config cfg.json --force matrix");
  CHECK(forced.out.find("cache hit") == std::string::npos);
  // New households invalidate the cache.
  REQUIRE(run(dir, "--config cfg.json --seed 4 synth").code == 0);
  REQUIRE(run(dir, "--config cfg.json --seed 4 ingest").code == 0);
  CHECK(run(dir, "--config cfg.json --seed 4 matrix").out.find("cache hit") ==
        std::string::npos);
}

TEST_CASE("pipeline output is byte-identical across runs") {
  TempDir a, b;
  write_config(a);
  write_config(b);
  REQUIRE(pipeline(a).code == 0);
  REQUIRE(pipeline(b).code == 0);
  for (const char* f : {"households.csv", "matrix.dmat", "plan.json", "plan.geojson",
                        "report.json", "report.csv", "households.geojson"}) {
    CHECK_MESSAGE(slurp(a / ("out/" + std::string(f))) == slurp(b / ("out/" + std::string(f))),
                  f);
  }
}

TEST_CASE("trace prints accepted swaps") {
  TempDir dir;
  write_config(dir);
  REQUIRE(run(dir, "--config cfg.json synth").code == 0);
  REQUIRE(run(dir, "--config cfg.json ingest").code == 0);
  REQUIRE(run(dir, "--config cfg.json matrix").code == 0);
  const auto r = run(dir, "--config cfg.json place --trace");
  CHECK(r.code == 0);
  CHECK(r.out.find("pass=1") != std::string::npos);
}
