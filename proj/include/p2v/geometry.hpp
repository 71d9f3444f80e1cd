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

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace p2v
{

/// Planar metric coordinate (meters). Traces are assumed to be projected already.
struct Point
{
  double x{0.0};
  double y{0.0};

  friend bool operator==(const Point &, const Point &) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }

struct Segment
{
  Point a;
  Point b;

  friend bool operator==(const Segment &, const Segment &) = default;
};

struct Polygon
{
  std::vector<Point> vertices;

  friend bool operator==(const Polygon &, const Polygon &) = default;
};

/// Direction of travel in degrees, counterclockwise from +x, kept in [0, 360).
class Heading
{
public:
  Heading() = default;
  explicit Heading(double degrees);

  double degrees() const { return degrees_; }
  Heading rotated(double delta_degrees) const { return Heading(degrees_ + delta_degrees); }

  friend bool operator==(const Heading &, const Heading &) = default;

private:
  double degrees_{0.0};
};

class DegenerateGeometryError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

double distance(Point p, Point q);

Point closest_point_on_segment(Point p, const Segment & s);
double distance_to_segment(Point p, const Segment & s);

/// Signed angle in (-180, 180] from the heading direction to the origin->target ray.
/// Throws DegenerateGeometryError when target == origin.
double relative_bearing(Point origin, Heading heading, Point target);

/// |bearing| <= 90 degrees, inclusive. A coincident target counts as in front.
bool is_in_front(Point origin, Heading heading, Point target);

/// Heading of the p->q displacement. Throws DegenerateGeometryError when p == q.
Heading heading_of(Point p, Point q);

/// Segment p-q is blocked iff some part of it runs through the strict interior of an
/// obstacle. Touching or sliding along a boundary does not block.
bool line_of_sight(Point p, Point q, std::span<const Polygon> obstacles);
bool segment_crosses_interior(Point p, Point q, const Polygon & poly);

/// Even-odd containment; points on the boundary are not strictly inside.
bool strictly_inside(Point p, const Polygon & poly);

bool segments_intersect(const Segment & s, const Segment & t);
bool is_simple_polygon(const Polygon & poly);

}  // namespace p2v
