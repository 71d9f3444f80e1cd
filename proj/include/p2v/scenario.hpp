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

#pragma once

#include "p2v/geometry.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace p2v
{

struct Crossing
{
  std::string id;
  Segment span;

  friend bool operator==(const Crossing &, const Crossing &) = default;
};

struct Building
{
  std::string id;
  Polygon outline;

  friend bool operator==(const Building &, const Building &) = default;
};

struct Bounds
{
  double min_x{0.0};
  double min_y{0.0};
  double max_x{0.0};
  double max_y{0.0};

  bool contains(Point p) const
  {
    return min_x <= p.x && p.x <= max_x && min_y <= p.y && p.y <= max_y;
  }

  friend bool operator==(const Bounds &, const Bounds &) = default;
};

struct CrossingHit
{
  const Crossing * crossing{nullptr};
  double distance{0.0};
};

class ScenarioError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Immutable world: crossings, building footprints and bounds, with a uniform-grid index
/// (50 m cells) for crossing and occlusion queries. Query results match a linear scan.
class ScenarioMap
{
public:
  static constexpr double kCellSize = 50.0;

  ScenarioMap() = default;
  /// Validates and indexes. Throws ScenarioError naming the offending element.
  ScenarioMap(Bounds bounds, std::vector<Crossing> crossings, std::vector<Building> buildings);

  const Bounds & bounds() const { return bounds_; }
  const std::vector<Crossing> & crossings() const { return crossings_; }
  const std::vector<Building> & buildings() const { return buildings_; }
  const std::vector<Polygon> & obstacles() const { return obstacles_; }

  /// Crossing minimizing segment distance; ties go to the smallest id.
  std::optional<CrossingHit> nearest_crossing(Point p) const;

  /// All crossings at distance <= r, ascending by (distance, id).
  std::vector<CrossingHit> crossings_within(Point p, double r) const;

  bool line_of_sight(Point p, Point q) const;

  friend bool operator==(const ScenarioMap & a, const ScenarioMap & b)
  {
    return a.bounds_ == b.bounds_ && a.crossings_ == b.crossings_ && a.buildings_ == b.buildings_;
  }

private:
  struct CellRange
  {
    int x0, y0, x1, y1;
  };

  CellRange cells_for_box(double min_x, double min_y, double max_x, double max_y) const;
  void build_index();

  Bounds bounds_;
  std::vector<Crossing> crossings_;
  std::vector<Building> buildings_;
  std::vector<Polygon> obstacles_;

  int nx_{0};
  int ny_{0};
  std::vector<std::vector<std::size_t>> crossing_cells_;
  std::vector<std::vector<std::size_t>> building_cells_;
};

ScenarioMap scenario_from_json(const nlohmann::json & doc);
nlohmann::json scenario_to_json(const ScenarioMap & map);

ScenarioMap load_scenario(const std::filesystem::path & path);
void save_scenario(const ScenarioMap & map, const std::filesystem::path & path);

}  // namespace p2v
