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

#include <algorithm>
#include <set>

#include "foodloc/error.hpp"
#include "foodloc/ingest.hpp"
#include "foodloc/rng.hpp"
#include "test_util.hpp"

using namespace foodloc;
using namespace foodloc::ingest;

namespace {

Household make(std::string id, std::optional<double> income, double weight = 1.0) {
  Household h;
  h.id = id;
  h.origin_id = id;
  h.location = {34.0, -118.0};
  h.income = income;
  h.weight = weight;
  return h;
}

std::vector<std::string> ids(const std::vector<Household>& hh) {
  std::vector<std::string> out;
  for (const auto& h : hh) out.push_back(h.id);
  return out;
}

const CsvSchema kCaSchema{.id_column = "block_id",
                          .lat_column = "latitude",
                          .lon_column = "longitude",
                          .income_column = "median_income"};

}  // namespace

TEST_CASE("splitmix64 matches the reference stream") {
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xe220a8397b1dcdafULL);
}

TEST_CASE("load_households keeps file order and attaches incomes") {
  TempDir dir;
  const auto path = dir.write("three.csv", "lat,lon,income\n34.1,-118.2,30000\n"
                                           "35.5,-119.0,\n36.0,-120.5,45000\n");
  const auto hh = load_households(path, {.income_column = "income"});
  REQUIRE(hh.size() == 3);
  CHECK(hh[0].id == "0");
  CHECK(hh[2].id == "2");
  CHECK(hh[1].location.lat == 35.5);
  CHECK(hh[0].income == 30000.0);
  CHECK_FALSE(hh[1].income.has_value());
  for (const auto& h : hh) {
    CHECK(h.weight == 1.0);
    CHECK(h.origin_id == h.id);
  }
}

TEST_CASE("load_households reads the CA-style fixture") {
  const auto hh = load_households(fixture("households_ca10.csv"), kCaSchema);
  REQUIRE(hh.size() == 10);
  CHECK(hh.front().id == "ca-001");
  CHECK(hh.back().id == "ca-010");
  CHECK(hh[3].income == 62800.0);
  CHECK(std::all_of(hh.begin(), hh.end(), [](auto& h) { return h.income.has_value(); }));
}

TEST_CASE("load_households errors") {
  TempDir dir;
  SUBCASE("latitude out of range names the row") {
    const auto path = dir.write("bad.csv", "lat,lon\n34,-118\n95.0,-118\n");
    try {
      load_households(path, {});
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Ingest);
      CHECK(std::string(e.what()).find(":3:") != std::string::npos);
      CHECK(std::string(e.what()).find("latitude") != std::string::npos);
    }
  }
  SUBCASE("unparseable value reports its line") {
    const auto path = dir.write("bad.csv", "lat,lon\n34,abc\n");
    CHECK_THROWS_WITH_AS(load_households(path, {}), doctest::Contains(":2:"), Error);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_households(dir / "nope.csv", {}), Error);
  }
  SUBCASE("missing column") {
    const auto path = dir.write("cols.csv", "y,x\n1,2\n");
    CHECK_THROWS_WITH_AS(load_households(path, {}), doctest::Contains("lat"), Error);
  }
}

TEST_CASE("filter_by_income") {
  const std::vector<Household> hh = {make("a", 30000), make("b", 45000), make("c", 40000)};
  CHECK(ids(filter_by_income(hh, 40000)) == std::vector<std::string>{"a", "c"});

  const std::vector<Household> none = {make("x", std::nullopt), make("y", std::nullopt)};
  CHECK(ids(filter_by_income(none, 40000)) == ids(none));

  const auto ca = load_households(fixture("households_ca10.csv"), kCaSchema);
  const auto kept = filter_by_income(ca, 40000);
  CHECK(kept.size() == 6);
  CHECK(ids(filter_by_income(kept, 40000)) == ids(kept));
}

TEST_CASE("sample") {
  std::vector<Household> hh;
  for (int i = 0; i < 10; ++i) hh.push_back(make(std::to_string(i), std::nullopt));

  CHECK(ids(sample(hh, 10, 1)) == ids(hh));
  CHECK(ids(sample(hh, 25, 1)) == ids(hh));
  CHECK(ids(sample(hh, 4, 99)) == ids(sample(hh, 4, 99)));
  // Golden value from a hand trace of splitmix64(42) driving partial
  // Fisher-Yates over indices 0..9.
  CHECK(ids(sample(hh, 3, 42)) == std::vector<std::string>{"3", "2", "4"});
  CHECK_THROWS_AS(sample(hh, 0, 1), Error);

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = sample(hh, 5, seed);
    const auto got = ids(s);
    const std::set<std::string> unique(got.begin(), got.end());
    CHECK(unique.size() == 5);
    for (const auto& id : got) CHECK(std::stoi(id) < 10);
  }
}

TEST_CASE("compute_weight") {
  CHECK(compute_weight(40000) == 1.25);
  CHECK(compute_weight(10000) == 5.0);
  CHECK(compute_weight(25000) == 2.0);
  CHECK(compute_weight(100) == 50.0);  // capped
  CHECK(compute_weight(10000, 5.0, 3.0) == 3.0);
  CHECK_THROWS_AS(compute_weight(0), Error);
  CHECK_THROWS_AS(compute_weight(-5), Error);

  SplitMix64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double income = 1.0 + 39999.0 * rng.uniform();
    CHECK(compute_weight(income) >= 1.25);
  }
}

TEST_CASE("apply_income_weights") {
  const std::vector<Household> hh = {make("a", 20000), make("b", std::nullopt)};
  const auto w = apply_income_weights(hh);
  CHECK(w[0].weight == 2.5);
  CHECK(w[1].weight == 1.0);
  const std::vector<Household> zero = {make("z", 0.0)};
  CHECK_THROWS_AS(apply_income_weights(zero), Error);
}

TEST_CASE("duplicate_by_weight") {
  CHECK(copy_count(1.25) == 1);
  CHECK(copy_count(1.5) == 2);
  CHECK(copy_count(2.5) == 3);
  CHECK(copy_count(0.2) == 1);

  const std::vector<Household> hh = {make("a", 40000, 1.25), make("b", 25000, 2.0),
                                     make("c", 10870, 4.6)};
  const auto d = duplicate_by_weight(hh);
  REQUIRE(d.size() == 8);
  CHECK(ids(d) == std::vector<std::string>{"a", "b#0", "b#1", "c#0", "c#1", "c#2",
                                           "c#3", "c#4"});
  for (const auto& h : d) CHECK(h.weight == 1.0);
  CHECK(d[4].origin_id == "c");
  CHECK(d[4].location == hh[2].location);
  CHECK(d[4].income == hh[2].income);

  std::vector<Household> ones = {make("p", 1), make("q", 2)};
  CHECK(ids(duplicate_by_weight(ones)) == ids(ones));
}

TEST_CASE("prepare replays filter, sample, weight and duplicate") {
  const auto ca = load_households(fixture("households_ca10.csv"), kCaSchema);
  IngestConfig cfg;
  cfg.weighting_mode = WeightingMode::Duplicate;
  const auto prepared = prepare(ca, cfg);
  // Kept incomes 28500 31000 39999 40000 18750 25000 -> weights
  // 1.754 1.613 1.250 1.25 2.667 2.0 -> copies 2+2+1+1+3+2.
  CHECK(prepared.size() == 11);
  std::set<std::string> origins;
  for (const auto& h : prepared) origins.insert(h.origin_id);
  CHECK(origins.size() == 6);

  cfg.sample_size = 3;
  cfg.seed = 11;
  const auto sampled = prepare(ca, cfg);
  std::set<std::string> sampled_origins;
  for (const auto& h : sampled) sampled_origins.insert(h.origin_id);
  CHECK(sampled_origins.size() == 3);
  CHECK(sampled.size() >= 3);

  cfg.sample_size = 0;
  CHECK_THROWS_AS(prepare(ca, cfg), Error);
}

TEST_CASE("save and reload prepared households") {
  TempDir dir;
  auto ca = load_households(fixture("households_ca10.csv"), kCaSchema);
  ca[2].city = "Los Angeles, CA";
  const auto dup = duplicate_by_weight(apply_income_weights(filter_by_income(ca, 40000)));
  save_households(dir / "prep.csv", dup);
  const auto back = load_households(dir / "prep.csv", prepared_schema());
  REQUIRE(back.size() == dup.size());
  for (std::size_t i = 0; i < dup.size(); ++i) {
    CHECK(back[i].id == dup[i].id);
    CHECK(back[i].origin_id == dup[i].origin_id);
    CHECK(back[i].location == dup[i].location);
    CHECK(back[i].income == dup[i].income);
    CHECK(back[i].weight == dup[i].weight);
    CHECK(back[i].city == dup[i].city);
  }
}
