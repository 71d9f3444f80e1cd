// Copyright 2026 The p2vsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "p2v/scenario.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

namespace p2v
{
namespace
{

using test::open_map;
using test::square;

std::filesystem::path write_temp(const std::string & name, const std::string & text)
{
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

std::string error_of(const std::function<void()> & f)
{
  try {
    f();
  } catch (const ScenarioError & e) {
    return e.what();
  }
  return {};
}

TEST(LoadScenario, MinimalFile)
{
  const auto path = write_temp("p2v_min_scenario.json", R"({
    "bounds": {"min_x": 0, "min_y": 0, "max_x": 100, "max_y": 100},
    "crossings": [{"id": "c1", "ax": 10, "ay": 10, "bx": 10, "by": 18}],
    "buildings": []
  })");
  const ScenarioMap map = load_scenario(path);
  ASSERT_EQ(map.crossings().size(), 1u);
  EXPECT_EQ(map.crossings()[0].id, "c1");
  EXPECT_TRUE(map.buildings().empty());
}

TEST(LoadScenario, DegenerateCrossingNamesId)
{
  const auto path = write_temp("p2v_degenerate.json", R"({
    "bounds": {"min_x": 0, "min_y": 0, "max_x": 100, "max_y": 100},
    "crossings": [{"id": "zebra-7", "ax": 5, "ay": 5, "bx": 5, "by": 5}]
  })");
  const std::string msg = error_of([&] { load_scenario(path); });
  EXPECT_NE(msg.find("zebra-7"), std::string::npos) << msg;
  EXPECT_NE(msg.find(path.string()), std::string::npos) << msg;
}

TEST(LoadScenario, BuildingOutsideBoundsNamesId)
{
  const std::string msg = error_of([] {
    ScenarioMap(Bounds{0, 0, 10, 10}, {}, {Building{"tower", square(5, 5, 12, 8)}});
  });
  EXPECT_NE(msg.find("tower"), std::string::npos) << msg;
  EXPECT_NE(msg.find("outside bounds"), std::string::npos) << msg;
}

TEST(LoadScenario, SelfIntersectingBuildingRejected)
{
  const std::string msg = error_of([] {
    ScenarioMap(
      Bounds{0, 0, 10, 10}, {}, {Building{"bowtie", Polygon{{{0, 0}, {2, 2}, {2, 0}, {0, 2}}}}});
  });
  EXPECT_NE(msg.find("bowtie"), std::string::npos) << msg;
}

TEST(LoadScenario, DuplicateIdsRejected)
{
  EXPECT_THROW(
    open_map({{"a", {{0, 0}, {1, 0}}}, {"a", {{5, 0}, {6, 0}}}}), ScenarioError);
}

TEST(LoadScenario, ParseErrorCarriesPath)
{
  const auto path = write_temp("p2v_broken.json", "{ not json");
  const std::string msg = error_of([&] { load_scenario(path); });
  EXPECT_NE(msg.find(path.string()), std::string::npos) << msg;
}

TEST(ScenarioJson, RoundTrip)
{
  const ScenarioMap map(
    Bounds{-50, -50, 50, 50}, {{"c1", {{0, 0}, {0, 8}}}, {"c2", {{10, 0.25}, {18, 0.25}}}},
    {{"b1", square(20, 20, 30, 35)}});
  const auto path = std::filesystem::temp_directory_path() / "p2v_roundtrip.json";
  save_scenario(map, path);
  EXPECT_EQ(load_scenario(path), map);
}

TEST(NearestCrossing, TieGoesToSmallestId)
{
  const ScenarioMap map = open_map({{"b", {{0, 10}, {4, 10}}}, {"a", {{0, -10}, {4, -10}}}});
  const auto hit = map.nearest_crossing({2, 0});
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->crossing->id, "a");
  EXPECT_DOUBLE_EQ(hit->distance, 10.0);
}

TEST(NearestCrossing, SingleCrossingAndEmptyMap)
{
  const ScenarioMap map = open_map({{"x", {{0, 0}, {4, 0}}}});
  EXPECT_DOUBLE_EQ(map.nearest_crossing({2, 3})->distance, 3.0);
  EXPECT_FALSE(open_map().nearest_crossing({2, 3}).has_value());
}

TEST(NearestCrossing, FindsFarCrossingBeyondIndexCells)
{
  const ScenarioMap map = open_map({{"far", {{900, 900}, {905, 900}}}});
  const auto hit = map.nearest_crossing({-900, -900});
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->crossing->id, "far");
}

TEST(CrossingsWithin, Examples)
{
  const ScenarioMap map = open_map({{"near", {{5, -1}, {5, 1}}}, {"far", {{-7, -1}, {-7, 1}}}});
  const auto zero = map.crossings_within({5, 0}, 0.0);
  ASSERT_EQ(zero.size(), 1u);
  EXPECT_EQ(zero[0].crossing->id, "near");
  EXPECT_DOUBLE_EQ(zero[0].distance, 0.0);
  EXPECT_TRUE(map.crossings_within({0, 0}, 4.0).empty());
  const auto both = map.crossings_within({0, 0}, 10.0);
  ASSERT_EQ(both.size(), 2u);
  EXPECT_EQ(both[0].crossing->id, "near");
  EXPECT_EQ(both[1].crossing->id, "far");
}

// The grid index must agree with a brute-force scan.
TEST(ScenarioIndex, MatchesLinearScan)
{
  std::mt19937_64 eng(11);
  std::uniform_real_distribution<double> u(-900.0, 900.0);
  std::uniform_real_distribution<double> len(1.0, 30.0);
  std::vector<Crossing> crossings;
  for (int i = 0; i < 80; ++i) {
    const Point a{u(eng), u(eng)};
    crossings.push_back({"c" + std::to_string(i), {a, a + Point{len(eng), len(eng)}}});
  }
  std::vector<Building> buildings;
  for (int i = 0; i < 60; ++i) {
    const Point a{u(eng), u(eng)};
    buildings.push_back({"b" + std::to_string(i), square(a.x, a.y, a.x + len(eng), a.y + len(eng))});
  }
  const ScenarioMap map = open_map(crossings, buildings);
  std::uniform_real_distribution<double> radius(0.0, 200.0);
  for (int i = 0; i < 300; ++i) {
    const Point p{u(eng), u(eng)};
    const double r = radius(eng);
    std::vector<std::string> expected;
    for (const Crossing & c : map.crossings()) {
      if (distance_to_segment(p, c.span) <= r) {
        expected.push_back(c.id);
      }
    }
    std::vector<std::string> got;
    for (const CrossingHit & h : map.crossings_within(p, r)) {
      got.push_back(h.crossing->id);
    }
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, expected);

    const Point q{p.x + radius(eng) - 100.0, p.y + radius(eng) - 100.0};
    EXPECT_EQ(map.line_of_sight(p, q), line_of_sight(p, q, map.obstacles()));
  }
}

}  // namespace
}  // namespace p2v
