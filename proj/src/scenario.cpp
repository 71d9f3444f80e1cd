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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace p2v
{

namespace
{

bool finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

std::string fmt_point(Point p)
{
  return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
}

bool hit_less(const CrossingHit & a, const CrossingHit & b)
{
  if (a.distance != b.distance) {
    return a.distance < b.distance;
  }
  return a.crossing->id < b.crossing->id;
}

}  // namespace

ScenarioMap::ScenarioMap(
  Bounds bounds, std::vector<Crossing> crossings, std::vector<Building> buildings)
: bounds_(bounds), crossings_(std::move(crossings)), buildings_(std::move(buildings))
{
  if (!(bounds_.min_x < bounds_.max_x) || !(bounds_.min_y < bounds_.max_y)) {
    throw ScenarioError("bounds: min must be strictly below max on both axes");
  }
  std::set<std::string> ids;
  for (const auto & c : crossings_) {
    if (!ids.insert(c.id).second) {
      throw ScenarioError("crossing '" + c.id + "': duplicate id");
    }
    if (!finite(c.span.a) || !finite(c.span.b)) {
      throw ScenarioError("crossing '" + c.id + "': non-finite coordinate");
    }
    if (c.span.a == c.span.b) {
      throw ScenarioError("crossing '" + c.id + "': degenerate span (identical endpoints)");
    }
    for (Point p : {c.span.a, c.span.b}) {
      if (!bounds_.contains(p)) {
        throw ScenarioError("crossing '" + c.id + "': endpoint " + fmt_point(p) + " outside bounds");
      }
    }
  }
  ids.clear();
  for (const auto & b : buildings_) {
    if (!ids.insert(b.id).second) {
      throw ScenarioError("building '" + b.id + "': duplicate id");
    }
    if (b.outline.vertices.size() < 3) {
      throw ScenarioError("building '" + b.id + "': fewer than 3 vertices");
    }
    for (Point p : b.outline.vertices) {
      if (!finite(p)) {
        throw ScenarioError("building '" + b.id + "': non-finite coordinate");
      }
      if (!bounds_.contains(p)) {
        throw ScenarioError("building '" + b.id + "': vertex " + fmt_point(p) + " outside bounds");
      }
    }
    if (!is_simple_polygon(b.outline)) {
      throw ScenarioError("building '" + b.id + "': polygon is not simple (self-intersecting)");
    }
  }
  obstacles_.reserve(buildings_.size());
  for (const auto & b : buildings_) {
    obstacles_.push_back(b.outline);
  }
  build_index();
}

ScenarioMap::CellRange ScenarioMap::cells_for_box(
  double min_x, double min_y, double max_x, double max_y) const
{
  auto clamp_cell = [](double v, int n) {
    if (!(v > 0.0)) {
      return 0;
    }
    if (v >= static_cast<double>(n)) {
      return n - 1;
    }
    return static_cast<int>(v);
  };
  return {
    clamp_cell((min_x - bounds_.min_x) / kCellSize, nx_),
    clamp_cell((min_y - bounds_.min_y) / kCellSize, ny_),
    clamp_cell((max_x - bounds_.min_x) / kCellSize, nx_),
    clamp_cell((max_y - bounds_.min_y) / kCellSize, ny_)};
}

void ScenarioMap::build_index()
{
  nx_ = std::max(1, static_cast<int>(std::ceil((bounds_.max_x - bounds_.min_x) / kCellSize)));
  ny_ = std::max(1, static_cast<int>(std::ceil((bounds_.max_y - bounds_.min_y) / kCellSize)));
  const auto ncells = static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
  crossing_cells_.assign(ncells, {});
  building_cells_.assign(ncells, {});

  auto insert = [&](auto & cells, std::size_t idx, double x0, double y0, double x1, double y1) {
    const CellRange r = cells_for_box(x0, y0, x1, y1);
    for (int cy = r.y0; cy <= r.y1; ++cy) {
      for (int cx = r.x0; cx <= r.x1; ++cx) {
        cells[static_cast<std::size_t>(cy) * nx_ + cx].push_back(idx);
      }
    }
  };
  for (std::size_t i = 0; i < crossings_.size(); ++i) {
    const Segment & s = crossings_[i].span;
    insert(
      crossing_cells_, i, std::min(s.a.x, s.b.x), std::min(s.a.y, s.b.y), std::max(s.a.x, s.b.x),
      std::max(s.a.y, s.b.y));
  }
  for (std::size_t i = 0; i < buildings_.size(); ++i) {
    double x0 = std::numeric_limits<double>::infinity();
    double y0 = x0;
    double x1 = -x0;
    double y1 = -x0;
    for (Point p : buildings_[i].outline.vertices) {
      x0 = std::min(x0, p.x);
      y0 = std::min(y0, p.y);
      x1 = std::max(x1, p.x);
      y1 = std::max(y1, p.y);
    }
    insert(building_cells_, i, x0, y0, x1, y1);
  }
}

std::vector<CrossingHit> ScenarioMap::crossings_within(Point p, double r) const
{
  std::vector<CrossingHit> out;
  if (!(r >= 0.0)) {
    return out;
  }
  auto consider = [&](std::size_t i) {
    const double d = distance_to_segment(p, crossings_[i].span);
    if (d <= r) {
      out.push_back({&crossings_[i], d});
    }
  };
  if (!std::isfinite(r) || crossings_.size() < 16) {
    for (std::size_t i = 0; i < crossings_.size(); ++i) {
      consider(i);
    }
  } else {
    const CellRange cr = cells_for_box(p.x - r, p.y - r, p.x + r, p.y + r);
    std::vector<std::size_t> candidates;
    for (int cy = cr.y0; cy <= cr.y1; ++cy) {
      for (int cx = cr.x0; cx <= cr.x1; ++cx) {
        const auto & cell = crossing_cells_[static_cast<std::size_t>(cy) * nx_ + cx];
        candidates.insert(candidates.end(), cell.begin(), cell.end());
      }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (std::size_t i : candidates) {
      consider(i);
    }
  }
  std::sort(out.begin(), out.end(), hit_less);
  return out;
}

std::optional<CrossingHit> ScenarioMap::nearest_crossing(Point p) const
{
  if (crossings_.empty()) {
    return std::nullopt;
  }
  // A hit inside radius r beats everything outside it, so widening until non-empty is exact.
  for (double r = kCellSize; std::isfinite(r); r *= 2.0) {
    auto hits = crossings_within(p, r);
    if (!hits.empty()) {
      return hits.front();
    }
    if (r > 1e12) {
      break;
    }
  }
  return crossings_within(p, std::numeric_limits<double>::infinity()).front();
}

bool ScenarioMap::line_of_sight(Point p, Point q) const
{
  if (buildings_.empty()) {
    return true;
  }
  const CellRange cr = cells_for_box(
    std::min(p.x, q.x), std::min(p.y, q.y), std::max(p.x, q.x), std::max(p.y, q.y));
  std::vector<std::size_t> candidates;
  for (int cy = cr.y0; cy <= cr.y1; ++cy) {
    for (int cx = cr.x0; cx <= cr.x1; ++cx) {
      const auto & cell = building_cells_[static_cast<std::size_t>(cy) * nx_ + cx];
      candidates.insert(candidates.end(), cell.begin(), cell.end());
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  return std::none_of(candidates.begin(), candidates.end(), [&](std::size_t i) {
    return segment_crosses_interior(p, q, obstacles_[i]);
  });
}

ScenarioMap scenario_from_json(const nlohmann::json & doc)
{
  auto number = [](const nlohmann::json & obj, const char * key, const std::string & where) {
    if (!obj.contains(key) || !obj.at(key).is_number()) {
      throw ScenarioError(where + ": missing or non-numeric '" + key + "'");
    }
    return obj.at(key).get<double>();
  };

  if (!doc.is_object()) {
    throw ScenarioError("scenario: top level must be an object");
  }
  if (!doc.contains("bounds")) {
    throw ScenarioError("scenario: missing 'bounds'");
  }
  const auto & jb = doc.at("bounds");
  Bounds bounds{
    number(jb, "min_x", "bounds"), number(jb, "min_y", "bounds"), number(jb, "max_x", "bounds"),
    number(jb, "max_y", "bounds")};

  std::vector<Crossing> crossings;
  if (doc.contains("crossings")) {
    std::size_t idx = 0;
    for (const auto & jc : doc.at("crossings")) {
      const std::string where = "crossings[" + std::to_string(idx++) + "]";
      if (!jc.contains("id") || !jc.at("id").is_string()) {
        throw ScenarioError(where + ": missing string 'id'");
      }
      const std::string id = jc.at("id").get<std::string>();
      const std::string w = "crossing '" + id + "'";
      crossings.push_back(
        {id,
         {{number(jc, "ax", w), number(jc, "ay", w)}, {number(jc, "bx", w), number(jc, "by", w)}}});
    }
  }

  std::vector<Building> buildings;
  if (doc.contains("buildings")) {
    std::size_t idx = 0;
    for (const auto & jbld : doc.at("buildings")) {
      const std::string where = "buildings[" + std::to_string(idx++) + "]";
      if (!jbld.contains("id") || !jbld.at("id").is_string()) {
        throw ScenarioError(where + ": missing string 'id'");
      }
      Building b{jbld.at("id").get<std::string>(), {}};
      if (!jbld.contains("vertices") || !jbld.at("vertices").is_array()) {
        throw ScenarioError("building '" + b.id + "': missing 'vertices' array");
      }
      for (const auto & jv : jbld.at("vertices")) {
        if (!jv.is_array() || jv.size() != 2 || !jv[0].is_number() || !jv[1].is_number()) {
          throw ScenarioError("building '" + b.id + "': vertex must be [x, y]");
        }
        b.outline.vertices.push_back({jv[0].get<double>(), jv[1].get<double>()});
      }
      buildings.push_back(std::move(b));
    }
  }
  return ScenarioMap(bounds, std::move(crossings), std::move(buildings));
}

nlohmann::json scenario_to_json(const ScenarioMap & map)
{
  nlohmann::json doc;
  const Bounds & b = map.bounds();
  doc["bounds"] = {{"min_x", b.min_x}, {"min_y", b.min_y}, {"max_x", b.max_x}, {"max_y", b.max_y}};
  doc["crossings"] = nlohmann::json::array();
  for (const auto & c : map.crossings()) {
    doc["crossings"].push_back(
      {{"id", c.id}, {"ax", c.span.a.x}, {"ay", c.span.a.y}, {"bx", c.span.b.x}, {"by", c.span.b.y}});
  }
  doc["buildings"] = nlohmann::json::array();
  for (const auto & bld : map.buildings()) {
    nlohmann::json verts = nlohmann::json::array();
    for (Point p : bld.outline.vertices) {
      verts.push_back({p.x, p.y});
    }
    doc["buildings"].push_back({{"id", bld.id}, {"vertices", verts}});
  }
  return doc;
}

ScenarioMap load_scenario(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError(path.string() + ": cannot open scenario file");
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error & e) {
    throw ScenarioError(path.string() + ": parse error: " + e.what());
  }
  try {
    return scenario_from_json(doc);
  } catch (const ScenarioError & e) {
    throw ScenarioError(path.string() + ": " + e.what());
  } catch (const nlohmann::json::exception & e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
}

void save_scenario(const ScenarioMap & map, const std::filesystem::path & path)
{
  std::ofstream out(path);
  if (!out) {
    throw ScenarioError(path.string() + ": cannot write scenario file");
  }
  out << scenario_to_json(map).dump(2) << '\n';
}

}  // namespace p2v
