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

#include "p2v/synthetic.hpp"

#include "p2v/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <queue>

namespace p2v
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRefusedCrossingPenalty = 1000.0;
constexpr double kOnCrossing = 0.5;     // pedestrian-to-span distance that counts as on it
constexpr double kCurbMargin = 0.3;     // closer than this to an end is still the curb
constexpr double kYieldSetback = 3.0;   // stop line distance before the crossing
constexpr double kYieldLookahead = 60.0;

struct Dir
{
  int dx;
  int dy;
  char name;
};

constexpr Dir kArms[] = {{1, 0, 'E'}, {-1, 0, 'W'}, {0, 1, 'N'}, {0, -1, 'S'}};

std::string crossing_id(int i, int j, char arm)
{
  char buf[48];
  std::snprintf(buf, sizeof(buf), "x%dy%d%c", i, j, arm);
  return buf;
}

std::string entity_id(char prefix, std::size_t n)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%05zu", prefix, n);
  return buf;
}

Point unit(Point d)
{
  const double n = std::hypot(d.x, d.y);
  return {d.x / n, d.y / n};
}

// ---------------------------------------------------------------------------------------------
// Polyline with arc-length parametrization.

struct Polyline
{
  std::vector<Point> pts;
  std::vector<double> cum;

  void finalize()
  {
    cum.assign(pts.size(), 0.0);
    for (std::size_t k = 1; k < pts.size(); ++k) {
      cum[k] = cum[k - 1] + distance(pts[k - 1], pts[k]);
    }
  }

  double length() const { return cum.empty() ? 0.0 : cum.back(); }

  std::size_t segment_at(double s) const
  {
    const auto it = std::upper_bound(cum.begin(), cum.end(), s);
    const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - cum.begin() - 1));
    return std::min(k, pts.size() - 2);
  }

  Point at(double s) const
  {
    const std::size_t k = segment_at(s);
    const double len = cum[k + 1] - cum[k];
    const double t = len > 0.0 ? std::clamp((s - cum[k]) / len, 0.0, 1.0) : 0.0;
    return pts[k] + t * (pts[k + 1] - pts[k]);
  }
};

// ---------------------------------------------------------------------------------------------
// Pedestrian sidewalk graph.

struct PedEdge
{
  int a;
  int b;
  double length;
  int crossing;  // index into the map's crossings, or -1
  bool block_side;
};

class SidewalkGraph
{
public:
  int node(Point p)
  {
    const auto key = std::make_pair(std::llround(p.x * 1000.0), std::llround(p.y * 1000.0));
    const auto it = index_.find(key);
    if (it != index_.end()) {
      return it->second;
    }
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(p);
    adj_.emplace_back();
    index_.emplace(key, id);
    return id;
  }

  void add_edge(int a, int b, int crossing, bool block_side)
  {
    const int e = static_cast<int>(edges_.size());
    edges_.push_back({a, b, distance(nodes_[a], nodes_[b]), crossing, block_side});
    adj_[a].push_back(e);
    adj_[b].push_back(e);
  }

  const Point & pos(int n) const { return nodes_[n]; }
  const PedEdge & edge(int e) const { return edges_[e]; }
  std::size_t edge_count() const { return edges_.size(); }

  int other(int e, int n) const { return edges_[e].a == n ? edges_[e].b : edges_[e].a; }

  int edge_between(int a, int b) const
  {
    for (int e : adj_[a]) {
      if (other(e, a) == b) {
        return e;
      }
    }
    return -1;
  }

  /// Dijkstra from `src`; `penalty(e)` is added to the length of edge e.
  void shortest(
    int src, const std::function<double(int)> & penalty, std::vector<double> & dist,
    std::vector<int> & prev) const
  {
    dist.assign(nodes_.size(), kInf);
    prev.assign(nodes_.size(), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[src] = 0.0;
    pq.push({0.0, src});
    while (!pq.empty()) {
      const auto [d, n] = pq.top();
      pq.pop();
      if (d > dist[n]) {
        continue;
      }
      for (int e : adj_[n]) {
        const int m = other(e, n);
        const double nd = d + edges_[e].length + penalty(e);
        if (nd < dist[m] || (nd == dist[m] && n < prev[m])) {
          if (nd < dist[m]) {
            pq.push({nd, m});
          }
          dist[m] = nd;
          prev[m] = n;
        }
      }
    }
  }

private:
  std::vector<Point> nodes_;
  std::vector<std::vector<int>> adj_;
  std::vector<PedEdge> edges_;
  std::map<std::pair<long long, long long>, int> index_;
};

// ---------------------------------------------------------------------------------------------
// World construction.

struct Stub
{
  int i;
  int j;
  Dir dir;
};

struct World
{
  ScenarioMap map;
  SidewalkGraph sidewalks;
  std::vector<int> block_side_edges;
  std::vector<Stub> stubs;
};

World build_world(const SyntheticParams & p)
{
  const StreetLayout & L = p.layout;
  const double B = p.block_size;
  const double w = L.sidewalk_offset;
  const double c = L.crossing_offset;

  World world;
  std::vector<Crossing> crossings;
  std::vector<Building> buildings;
  std::vector<std::pair<int, int>> crossing_nodes;

  for (int i = 0; i <= p.blocks_x; ++i) {
    for (int j = 0; j <= p.blocks_y; ++j) {
      const Point center{i * B, j * B};
      for (const Dir & d : kArms) {
        const Point along{static_cast<double>(d.dx), static_cast<double>(d.dy)};
        const Point side{-along.y, along.x};
        const Point left = center + c * along + w * side;
        const Point right = center + c * along - w * side;
        crossings.push_back({crossing_id(i, j, d.name), {right, left}});
        crossing_nodes.emplace_back(world.sidewalks.node(left), world.sidewalks.node(right));
        // Sidewalk corner to crossing endpoint, both sides.
        world.sidewalks.add_edge(
          world.sidewalks.node(center + w * along + w * side), crossing_nodes.back().first, -1,
          false);
        world.sidewalks.add_edge(
          world.sidewalks.node(center + w * along - w * side), crossing_nodes.back().second, -1,
          false);
      }
      const bool edge_x = i == 0 || i == p.blocks_x;
      const bool edge_y = j == 0 || j == p.blocks_y;
      if (edge_x || edge_y) {
        for (const Dir & d : kArms) {
          const int ni = i + d.dx;
          const int nj = j + d.dy;
          if (ni < 0 || ni > p.blocks_x || nj < 0 || nj > p.blocks_y) {
            world.stubs.push_back({i, j, d});
          }
        }
      }
    }
  }
  for (std::size_t k = 0; k < crossing_nodes.size(); ++k) {
    world.sidewalks.add_edge(
      crossing_nodes[k].first, crossing_nodes[k].second, static_cast<int>(k), false);
  }
  // Mid-block sidewalks on both sides of every grid road.
  for (int i = 0; i <= p.blocks_x; ++i) {
    for (int j = 0; j <= p.blocks_y; ++j) {
      const Point center{i * B, j * B};
      for (const Dir & d : {kArms[0], kArms[2]}) {
        const int ni = i + d.dx;
        const int nj = j + d.dy;
        if (ni > p.blocks_x || nj > p.blocks_y) {
          continue;
        }
        const Point along{static_cast<double>(d.dx), static_cast<double>(d.dy)};
        const Point side{-along.y, along.x};
        for (double s : {1.0, -1.0}) {
          const int a = world.sidewalks.node(center + c * along + (s * w) * side);
          const int b = world.sidewalks.node(center + (B - c) * along + (s * w) * side);
          world.block_side_edges.push_back(static_cast<int>(world.sidewalks.edge_count()));
          world.sidewalks.add_edge(a, b, -1, true);
        }
      }
    }
  }

  const double S = L.building_setback;
  for (int i = 0; i < p.blocks_x; ++i) {
    for (int j = 0; j < p.blocks_y; ++j) {
      const double x0 = i * B + S;
      const double x1 = (i + 1) * B - S;
      const double y0 = j * B + S;
      const double y1 = (j + 1) * B - S;
      char id[32];
      std::snprintf(id, sizeof(id), "b%dx%d", i, j);
      buildings.push_back({id, Polygon{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}}});
    }
  }
  const double margin = L.stub_length;
  Bounds bounds{-margin, -margin, p.blocks_x * B + margin, p.blocks_y * B + margin};
  world.map = ScenarioMap(bounds, std::move(crossings), std::move(buildings));
  return world;
}

// ---------------------------------------------------------------------------------------------
// Vehicles.

struct Vehicle
{
  std::string id;
  Polyline lane;
  std::vector<double> turns;  // arc positions of lane corners
  std::vector<std::pair<double, std::size_t>> conflicts;  // (arc, crossing index) along the lane
  double s{0.0};
  double v{0.0};
  double vmax{0.0};
  Point pos;
  Heading heading;
  bool inserted{false};
  bool done{false};
};

Polyline lane_route(const SyntheticParams & p, const Stub & from, const Stub & to, rng::Engine & eng)
{
  const double B = p.block_size;
  auto node = [&](int i, int j) { return Point{i * B, j * B}; };

  std::vector<Point> centerline;
  centerline.push_back(
    node(from.i, from.j) + p.layout.stub_length * Point{double(from.dir.dx), double(from.dir.dy)});
  int i = from.i;
  int j = from.j;
  centerline.push_back(node(i, j));
  int rx = std::abs(to.i - i);
  int ry = std::abs(to.j - j);
  const int sx = to.i > i ? 1 : -1;
  const int sy = to.j > j ? 1 : -1;
  while (rx + ry > 0) {
    const bool move_x = rng::uniform(eng, 0.0, 1.0) * (rx + ry) < rx;
    if (move_x) {
      i += sx;
      --rx;
    } else {
      j += sy;
      --ry;
    }
    centerline.push_back(node(i, j));
  }
  centerline.push_back(
    node(to.i, to.j) + p.layout.stub_length * Point{double(to.dir.dx), double(to.dir.dy)});

  // Keep only direction changes.
  std::vector<Point> corners{centerline.front()};
  for (std::size_t k = 1; k + 1 < centerline.size(); ++k) {
    const Point d0 = unit(centerline[k] - corners.back());
    const Point d1 = unit(centerline[k + 1] - centerline[k]);
    if (std::abs(d0.x - d1.x) > 1e-9 || std::abs(d0.y - d1.y) > 1e-9) {
      corners.push_back(centerline[k]);
    }
  }
  corners.push_back(centerline.back());

  const double o = p.layout.lane_offset;
  auto right_of = [](Point d) { return Point{d.y, -d.x}; };
  Polyline lane;
  for (std::size_t k = 0; k < corners.size(); ++k) {
    if (k == 0) {
      lane.pts.push_back(corners[0] + o * right_of(unit(corners[1] - corners[0])));
    } else if (k + 1 == corners.size()) {
      lane.pts.push_back(corners[k] + o * right_of(unit(corners[k] - corners[k - 1])));
    } else {
      // Perpendicular turn: the two offset lines meet at corner + o*r_in + o*r_out.
      const Point r_in = right_of(unit(corners[k] - corners[k - 1]));
      const Point r_out = right_of(unit(corners[k + 1] - corners[k]));
      lane.pts.push_back(corners[k] + o * r_in + o * r_out);
    }
  }
  lane.finalize();
  return lane;
}

/// Arc gap to the nearest vehicle ahead on this vehicle's lane, or +inf.
double gap_ahead(const Vehicle & me, const std::vector<Vehicle> & fleet, double lookahead)
{
  double best = kInf;
  const std::size_t k0 = me.lane.segment_at(me.s);
  for (const Vehicle & other : fleet) {
    if (&other == &me || !other.inserted || other.done) {
      continue;
    }
    for (std::size_t k = k0; k + 1 < me.lane.pts.size(); ++k) {
      if (me.lane.cum[k] > me.s + lookahead) {
        break;
      }
      const Segment seg{me.lane.pts[k], me.lane.pts[k + 1]};
      const Point foot = closest_point_on_segment(other.pos, seg);
      if (distance(foot, other.pos) > 1.0) {
        continue;
      }
      const double arc = me.lane.cum[k] + distance(seg.a, foot);
      if (arc <= me.s) {
        continue;
      }
      const Heading seg_heading = heading_of(seg.a, seg.b);
      const double turn = std::abs(std::remainder(other.heading.degrees() - seg_heading.degrees(), 360.0));
      if (turn > 45.0) {
        continue;
      }
      best = std::min(best, arc - me.s);
      break;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------------------------
// Pedestrians.

struct Pedestrian
{
  std::string id;
  rng::Engine eng;
  std::vector<Point> waypoints;  // waypoints[0] is the next target
  std::vector<int> nodes;        // graph node per waypoint, -1 for the final point
  int dest_edge{-1};
  Point dest;
  std::map<int, std::int64_t> refused;  // crossing edge -> penalty expiry tick
  Point pos;
  Heading heading;
  double speed{0.0};
  bool done{false};
};

struct Route
{
  std::vector<Point> waypoints;
  std::vector<int> nodes;
  double length{kInf};
};

Route plan_from_node(
  const SidewalkGraph & g, int src, Point src_pos, int dest_edge, Point dest,
  const std::function<double(int)> & penalty)
{
  std::vector<double> dist;
  std::vector<int> prev;
  g.shortest(src, penalty, dist, prev);
  const PedEdge & de = g.edge(dest_edge);
  Route best;
  for (int end : {de.a, de.b}) {
    if (dist[end] == kInf) {
      continue;
    }
    const double total = distance(src_pos, g.pos(src)) + dist[end] + distance(g.pos(end), dest);
    if (total < best.length) {
      best.length = total;
      std::vector<int> path;
      for (int n = end; n != -1; n = prev[n]) {
        path.push_back(n);
      }
      std::reverse(path.begin(), path.end());
      best.waypoints.clear();
      best.nodes.clear();
      for (int n : path) {
        best.waypoints.push_back(g.pos(n));
        best.nodes.push_back(n);
      }
      best.waypoints.push_back(dest);
      best.nodes.push_back(-1);
    }
  }
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------------------------

void SyntheticParams::validate() const
{
  const StreetLayout & L = layout;
  if (blocks_x < 1 || blocks_y < 1) {
    throw ConfigError("synthetic: need at least one block per axis");
  }
  for (double v : {block_size, duration, vehicle_interarrival, pedestrian_interarrival, speed_limit,
                   ped_target_speed, step}) {
    if (!(v > 0.0)) {
      throw ConfigError("synthetic: sizes, durations, rates and speeds must be positive");
    }
  }
  if (!(warmup >= 0.0)) {
    throw ConfigError("synthetic: warmup must not be negative");
  }
  if (vehicle_interarrival < 1.0 || pedestrian_interarrival < 1.0) {
    throw ConfigError("synthetic: interarrival times are at least 1 s (one trial per second)");
  }
  if (!(crossing_decision_noise >= 0.0 && crossing_decision_noise < 1.0)) {
    throw ConfigError("synthetic: crossing_decision_noise must lie in [0, 1)");
  }
  if (!(inattentive_prob >= 0.0 && inattentive_prob <= 1.0)) {
    throw ConfigError("synthetic: inattentive_prob must lie in [0, 1]");
  }
  if (!(L.lane_offset > 0.0 && L.lane_offset < L.sidewalk_offset &&
        L.sidewalk_offset < L.crossing_offset && L.sidewalk_offset < L.building_setback &&
        2.0 * L.building_setback < block_size && 2.0 * L.crossing_offset + 20.0 < block_size)) {
    throw ConfigError("synthetic: street layout does not fit the block size");
  }
  if (!(L.stub_length > L.crossing_offset)) {
    throw ConfigError("synthetic: stub roads must extend past the crossings");
  }
  const double per_second = 1.0 / step;
  if (std::abs(per_second - std::round(per_second)) > 1e-6) {
    throw ConfigError("synthetic: step must divide one second");
  }
}

SyntheticParams synthetic_params_from_json(const nlohmann::json & j)
{
  SyntheticParams p;
  auto get = [&](const char * key, auto & field) {
    if (j.contains(key)) {
      field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    }
  };
  get("blocks_x", p.blocks_x);
  get("blocks_y", p.blocks_y);
  get("block_size", p.block_size);
  get("duration", p.duration);
  get("warmup", p.warmup);
  get("vehicle_interarrival", p.vehicle_interarrival);
  get("pedestrian_interarrival", p.pedestrian_interarrival);
  get("speed_limit", p.speed_limit);
  get("ped_target_speed", p.ped_target_speed);
  get("crossing_decision_noise", p.crossing_decision_noise);
  get("inattentive_prob", p.inattentive_prob);
  get("seed", p.seed);
  get("step", p.step);
  if (j.contains("layout")) {
    const auto & l = j.at("layout");
    auto lget = [&](const char * key, double & field) {
      if (l.contains(key)) {
        field = l.at(key).get<double>();
      }
    };
    lget("lane_offset", p.layout.lane_offset);
    lget("sidewalk_offset", p.layout.sidewalk_offset);
    lget("crossing_offset", p.layout.crossing_offset);
    lget("building_setback", p.layout.building_setback);
    lget("stub_length", p.layout.stub_length);
    lget("turn_speed", p.layout.turn_speed);
    lget("headway", p.layout.headway);
    lget("min_gap", p.layout.min_gap);
    lget("accel", p.layout.accel);
    lget("comfort_decel", p.layout.comfort_decel);
    lget("ped_max_trip", p.layout.ped_max_trip);
    lget("ped_lookahead", p.layout.ped_lookahead);
    lget("reroute_memory", p.layout.reroute_memory);
  }
  p.validate();
  return p;
}

nlohmann::json to_json(const SyntheticParams & p)
{
  const StreetLayout & l = p.layout;
  return {
    {"blocks_x", p.blocks_x},
    {"blocks_y", p.blocks_y},
    {"block_size", p.block_size},
    {"duration", p.duration},
    {"warmup", p.warmup},
    {"vehicle_interarrival", p.vehicle_interarrival},
    {"pedestrian_interarrival", p.pedestrian_interarrival},
    {"speed_limit", p.speed_limit},
    {"ped_target_speed", p.ped_target_speed},
    {"crossing_decision_noise", p.crossing_decision_noise},
    {"inattentive_prob", p.inattentive_prob},
    {"seed", p.seed},
    {"step", p.step},
    {"layout",
     {{"lane_offset", l.lane_offset},
      {"sidewalk_offset", l.sidewalk_offset},
      {"crossing_offset", l.crossing_offset},
      {"building_setback", l.building_setback},
      {"stub_length", l.stub_length},
      {"turn_speed", l.turn_speed},
      {"headway", l.headway},
      {"min_gap", l.min_gap},
      {"accel", l.accel},
      {"comfort_decel", l.comfort_decel},
      {"ped_max_trip", l.ped_max_trip},
      {"ped_lookahead", l.ped_lookahead},
      {"reroute_memory", l.reroute_memory}}},
  };
}

SyntheticParams load_synthetic_params(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(path.string() + ": cannot open synthetic parameter file");
  }
  try {
    return synthetic_params_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception & e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const ConfigError & e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ScenarioMap build_grid_map(const SyntheticParams & p)
{
  p.validate();
  return build_world(p).map;
}

std::vector<std::int64_t> arrival_seconds(rng::Engine & eng, double interarrival, double duration)
{
  std::vector<std::int64_t> out;
  const double prob = 1.0 / interarrival;
  const auto seconds = static_cast<std::int64_t>(std::ceil(duration - 1e-9));
  for (std::int64_t s = 0; s < seconds; ++s) {
    if (rng::bernoulli(eng, prob)) {
      out.push_back(s);
    }
  }
  return out;
}

double sample_vehicle_max_speed(rng::Engine & eng, double speed_limit)
{
  return std::clamp(rng::normal(eng, 1.0, 0.1), 0.2, 2.0) * speed_limit;
}

double sample_pedestrian_step_speed(rng::Engine & eng, double target)
{
  return target - rng::uniform(eng, 0.0, 0.2) * target;
}

TraceSequence generate_synthetic(const SyntheticParams & p, ScenarioMap & map_out)
{
  p.validate();
  World world = build_world(p);
  const StreetLayout & L = p.layout;
  const SidewalkGraph & g = world.sidewalks;
  const ScenarioMap & map = world.map;
  const double dt = p.step;
  const auto ticks_per_second = static_cast<std::int64_t>(std::llround(1.0 / dt));
  const auto warmup_ticks = static_cast<std::int64_t>(std::llround(p.warmup / dt));
  const auto total_ticks = warmup_ticks + static_cast<std::int64_t>(std::llround(p.duration / dt));
  const double horizon = p.warmup + p.duration;

  auto veh_arrivals_eng = rng::stream(p.seed, "arrivals", "vehicle");
  auto ped_arrivals_eng = rng::stream(p.seed, "arrivals", "pedestrian");
  const auto veh_arrivals = arrival_seconds(veh_arrivals_eng, p.vehicle_interarrival, horizon);
  const auto ped_arrivals = arrival_seconds(ped_arrivals_eng, p.pedestrian_interarrival, horizon);
  std::size_t next_veh_arrival = 0;
  std::size_t next_ped_arrival = 0;

  std::vector<Vehicle> fleet;
  std::vector<std::deque<std::size_t>> stub_queue(world.stubs.size());
  std::vector<Pedestrian> crowd;
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(total_ticks - warmup_ticks));

  auto spawn_vehicle = [&]() {
    const std::string id = entity_id('v', fleet.size());
    auto eng = rng::stream(p.seed, "vehicle", id);
    const std::size_t from = rng::index(eng, world.stubs.size());
    std::size_t to = rng::index(eng, world.stubs.size() - 1);
    if (to >= from) {
      ++to;
    }
    Vehicle v;
    v.id = id;
    v.lane = lane_route(p, world.stubs[from], world.stubs[to], eng);
    for (std::size_t k = 1; k + 1 < v.lane.pts.size(); ++k) {
      v.turns.push_back(v.lane.cum[k]);
    }
    const auto & all = map.crossings();
    for (std::size_t k = 0; k + 1 < v.lane.pts.size(); ++k) {
      const Segment seg{v.lane.pts[k], v.lane.pts[k + 1]};
      for (std::size_t c = 0; c < all.size(); ++c) {
        if (segments_intersect(seg, all[c].span)) {
          const Point hit = closest_point_on_segment(all[c].span.a, seg);
          const Point along = closest_point_on_segment(
            closest_point_on_segment(hit, all[c].span), seg);
          v.conflicts.emplace_back(v.lane.cum[k] + distance(seg.a, along), c);
        }
      }
    }
    std::sort(v.conflicts.begin(), v.conflicts.end());
    v.vmax = sample_vehicle_max_speed(eng, p.speed_limit);
    v.v = std::min(v.vmax, p.speed_limit);
    v.pos = v.lane.pts.front();
    v.heading = heading_of(v.lane.pts[0], v.lane.pts[1]);
    fleet.push_back(std::move(v));
    stub_queue[from].push_back(fleet.size() - 1);
  };

  auto spawn_pedestrian = [&]() {
    Pedestrian ped;
    ped.id = entity_id('p', crowd.size());
    ped.eng = rng::stream(p.seed, "pedestrian", ped.id);
    const int spawn_edge = world.block_side_edges[rng::index(ped.eng, world.block_side_edges.size())];
    const PedEdge & se = g.edge(spawn_edge);
    const double margin = 10.0;
    const Point sa = g.pos(se.a);
    const Point sb = g.pos(se.b);
    const Point start = sa + (rng::uniform(ped.eng, margin, se.length - margin) / se.length) * (sb - sa);

    Route best;
    for (int attempt = 0; attempt < 20; ++attempt) {
      const int dest_edge =
        world.block_side_edges[rng::index(ped.eng, world.block_side_edges.size())];
      const PedEdge & de = g.edge(dest_edge);
      const Point da = g.pos(de.a);
      const Point db = g.pos(de.b);
      const Point dest =
        da + (rng::uniform(ped.eng, margin, de.length - margin) / de.length) * (db - da);
      Route route;
      if (dest_edge == spawn_edge) {
        route.waypoints = {dest};
        route.nodes = {-1};
        route.length = distance(start, dest);
      } else {
        for (int first : {se.a, se.b}) {
          Route r = plan_from_node(g, first, start, dest_edge, dest, [](int) { return 0.0; });
          if (r.length < route.length) {
            route = std::move(r);
          }
        }
      }
      ped.dest_edge = dest_edge;
      ped.dest = dest;
      best = std::move(route);
      if (best.length <= L.ped_max_trip && best.length > 2.0 * margin) {
        break;
      }
    }
    ped.waypoints = std::move(best.waypoints);
    ped.nodes = std::move(best.nodes);
    ped.pos = start;
    ped.heading = ped.waypoints.front() == start ? Heading(0.0) : heading_of(start, ped.waypoints.front());
    ped.speed = sample_pedestrian_step_speed(ped.eng, p.ped_target_speed);
    crowd.push_back(std::move(ped));
  };

  // Noisy gap acceptance: cross when the estimated arrival time of the nearest approaching
  // vehicle exceeds the time needed to walk the crossing.
  auto accepts_crossing = [&](Pedestrian & ped, int crossing_index) {
    const Segment & span = map.crossings()[static_cast<std::size_t>(crossing_index)].span;
    if (rng::bernoulli(ped.eng, p.inattentive_prob)) {
      return true;
    }
    const double clear_time = distance(span.a, span.b) / p.ped_target_speed;
    double soonest = kInf;
    for (const Vehicle & v : fleet) {
      if (!v.inserted || v.done) {
        continue;
      }
      const Point near = closest_point_on_segment(v.pos, span);
      const double d = distance(v.pos, near);
      if (d > L.ped_lookahead || !is_in_front(v.pos, v.heading, near)) {
        continue;
      }
      soonest = std::min(soonest, d / std::max(v.v, 0.5));
    }
    if (soonest == kInf) {
      return true;
    }
    const double noise = rng::uniform(ped.eng, -p.crossing_decision_noise, p.crossing_decision_noise);
    return soonest * (1.0 + noise) > clear_time;
  };

  auto replan = [&](Pedestrian & ped, int node, std::int64_t tick) {
    auto penalty = [&](int e) {
      const auto it = ped.refused.find(e);
      return (it != ped.refused.end() && it->second > tick) ? kRefusedCrossingPenalty : 0.0;
    };
    Route r = plan_from_node(g, node, g.pos(node), ped.dest_edge, ped.dest, penalty);
    ped.waypoints = std::move(r.waypoints);
    ped.nodes = std::move(r.nodes);
    // The first waypoint is the node we are standing on.
    ped.waypoints.erase(ped.waypoints.begin());
    ped.nodes.erase(ped.nodes.begin());
  };

  const auto memory_ticks = static_cast<std::int64_t>(std::llround(L.reroute_memory / dt));

  for (std::int64_t tick = 0; tick < total_ticks; ++tick) {
    // Crossings with a pedestrian out on the roadway; vehicles yield to them.
    std::vector<std::uint8_t> occupied(map.crossings().size(), 0);
    for (const Pedestrian & ped : crowd) {
      if (ped.done) {
        continue;
      }
      for (const CrossingHit & hit : map.crossings_within(ped.pos, kOnCrossing)) {
        const Segment & span = hit.crossing->span;
        const double len = distance(span.a, span.b);
        const double along = distance(span.a, closest_point_on_segment(ped.pos, span));
        if (along > kCurbMargin && along < len - kCurbMargin) {
          occupied[static_cast<std::size_t>(hit.crossing - map.crossings().data())] = 1;
        }
      }
    }

    // Moves first, so newcomers appear at their spawn point in their first frame.
    for (Vehicle & v : fleet) {
      if (!v.inserted || v.done) {
        continue;
      }
      double target = v.vmax;
      for (double turn : v.turns) {
        if (turn >= v.s) {
          target = std::min(
            target, std::sqrt(L.turn_speed * L.turn_speed + 2.0 * L.comfort_decel * (turn - v.s)));
        }
      }
      for (const auto & [arc, c] : v.conflicts) {
        const double to_stop = arc - kYieldSetback - v.s;
        if (to_stop > kYieldLookahead) {
          break;
        }
        if (to_stop > 0.0 && occupied[c]) {
          target = std::min(target, std::sqrt(2.0 * L.comfort_decel * to_stop));
        }
      }
      const double gap = gap_ahead(v, fleet, 80.0);
      if (gap < kInf) {
        target = std::min(target, std::max(0.0, (gap - L.min_gap) / L.headway));
      }
      const double nv = target < v.v ? target : std::min(target, v.v + L.accel * dt);
      v.v = nv;
      const Point before = v.pos;
      v.s += nv * dt;
      if (v.s >= v.lane.length()) {
        v.done = true;
        continue;
      }
      v.pos = v.lane.at(v.s);
      if (!(v.pos == before)) {
        v.heading = heading_of(before, v.pos);
      }
    }

    for (Pedestrian & ped : crowd) {
      if (ped.done) {
        continue;
      }
      const double speed = sample_pedestrian_step_speed(ped.eng, p.ped_target_speed);
      const Point before = ped.pos;
      double remaining = speed * dt;
      int decisions = 0;
      while (remaining > 0.0 && !ped.waypoints.empty()) {
        const Point target = ped.waypoints.front();
        const double d = distance(ped.pos, target);
        if (d > remaining) {
          ped.pos = ped.pos + (remaining / d) * (target - ped.pos);
          remaining = 0.0;
          break;
        }
        ped.pos = target;
        remaining -= d;
        const int node = ped.nodes.front();
        ped.waypoints.erase(ped.waypoints.begin());
        ped.nodes.erase(ped.nodes.begin());
        if (node < 0 || ped.nodes.empty() || ped.nodes.front() < 0) {
          continue;
        }
        const int e = g.edge_between(node, ped.nodes.front());
        if (e < 0 || g.edge(e).crossing < 0 || decisions >= 3) {
          continue;
        }
        ++decisions;
        if (!accepts_crossing(ped, g.edge(e).crossing)) {
          ped.refused[e] = tick + memory_ticks;
          replan(ped, node, tick);
        }
      }
      if (ped.waypoints.empty()) {
        ped.done = true;
        continue;
      }
      ped.speed = speed;
      if (!(ped.pos == before)) {
        ped.heading = heading_of(before, ped.pos);
      }
    }

    if (tick % ticks_per_second == 0) {
      const std::int64_t second = tick / ticks_per_second;
      while (next_veh_arrival < veh_arrivals.size() && veh_arrivals[next_veh_arrival] == second) {
        spawn_vehicle();
        ++next_veh_arrival;
      }
      while (next_ped_arrival < ped_arrivals.size() && ped_arrivals[next_ped_arrival] == second) {
        spawn_pedestrian();
        ++next_ped_arrival;
      }
    }
    // Release queued vehicles whose entry point is clear.
    for (auto & queue : stub_queue) {
      if (queue.empty()) {
        continue;
      }
      Vehicle & v = fleet[queue.front()];
      const bool clear = std::none_of(fleet.begin(), fleet.end(), [&](const Vehicle & o) {
        return o.inserted && !o.done && distance(o.pos, v.pos) < L.min_gap + 2.0 * L.headway * v.v;
      });
      if (clear) {
        v.inserted = true;
        queue.pop_front();
      }
    }

    if (tick < warmup_ticks) {
      continue;
    }
    Frame f;
    f.tick = tick - warmup_ticks;
    f.t = static_cast<double>(f.tick) * dt;
    for (const Vehicle & v : fleet) {
      if (v.inserted && !v.done) {
        f.states.push_back({v.id, EntityKind::vehicle, v.pos, v.heading, v.v});
      }
    }
    for (const Pedestrian & ped : crowd) {
      if (!ped.done) {
        f.states.push_back({ped.id, EntityKind::pedestrian, ped.pos, ped.heading, ped.speed});
      }
    }
    frames.push_back(std::move(f));
  }

  map_out = std::move(world.map);
  return TraceSequence::from_frames(dt, std::move(frames));
}

}  // namespace p2v
