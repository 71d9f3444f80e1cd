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

#include "p2v/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace p2v
{

namespace
{

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double cross(Point o, Point a, Point b)
{
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }

int sign(double v) { return (v > 0.0) - (v < 0.0); }

// Assumes o, a, b collinear.
bool within_box(Point a, Point b, Point p)
{
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

// Parameter of point c projected on p->q, for collinear points.
double param_on(Point p, Point q, Point c)
{
  const Point d = q - p;
  return dot(c - p, d) / dot(d, d);
}

}  // namespace

Heading::Heading(double degrees)
{
  double d = std::fmod(degrees, 360.0);
  if (d < 0.0) {
    d += 360.0;
  }
  // fmod of a tiny negative value can round back up to 360.
  if (d >= 360.0) {
    d = 0.0;
  }
  degrees_ = d;
}

double distance(Point p, Point q) { return std::hypot(p.x - q.x, p.y - q.y); }

Point closest_point_on_segment(Point p, const Segment & s)
{
  const Point d = s.b - s.a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) {
    return s.a;
  }
  const double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
  return s.a + t * d;
}

double distance_to_segment(Point p, const Segment & s)
{
  return distance(p, closest_point_on_segment(p, s));
}

double relative_bearing(Point origin, Heading heading, Point target)
{
  if (origin == target) {
    throw DegenerateGeometryError("relative_bearing: target coincides with origin");
  }
  const double ray = std::atan2(target.y - origin.y, target.x - origin.x) * kRadToDeg;
  double rel = std::fmod(ray - heading.degrees(), 360.0);
  if (rel <= -180.0) {
    rel += 360.0;
  } else if (rel > 180.0) {
    rel -= 360.0;
  }
  return rel;
}

bool is_in_front(Point origin, Heading heading, Point target)
{
  if (origin == target) {
    return true;
  }
  return std::abs(relative_bearing(origin, heading, target)) <= 90.0;
}

Heading heading_of(Point p, Point q)
{
  if (p == q) {
    throw DegenerateGeometryError("heading_of: zero displacement");
  }
  return Heading(std::atan2(q.y - p.y, q.x - p.x) * kRadToDeg);
}

bool segments_intersect(const Segment & s, const Segment & t)
{
  const double d1 = cross(t.a, t.b, s.a);
  const double d2 = cross(t.a, t.b, s.b);
  const double d3 = cross(s.a, s.b, t.a);
  const double d4 = cross(s.a, s.b, t.b);
  if (sign(d1) * sign(d2) < 0 && sign(d3) * sign(d4) < 0) {
    return true;
  }
  return (d1 == 0.0 && within_box(t.a, t.b, s.a)) || (d2 == 0.0 && within_box(t.a, t.b, s.b)) ||
         (d3 == 0.0 && within_box(s.a, s.b, t.a)) || (d4 == 0.0 && within_box(s.a, s.b, t.b));
}

bool strictly_inside(Point p, const Polygon & poly)
{
  const auto & v = poly.vertices;
  const std::size_t n = v.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = v[j];
    const Point b = v[i];
    if (cross(a, b, p) == 0.0 && within_box(a, b, p)) {
      return false;
    }
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_at = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_at) {
        inside = !inside;
      }
    }
  }
  return inside;
}

bool segment_crosses_interior(Point p, Point q, const Polygon & poly)
{
  if (p == q) {
    return strictly_inside(p, poly);
  }
  // Split p-q at every contact with the boundary; each piece is then wholly inside or
  // wholly outside, which its midpoint decides.
  std::vector<double> cuts{0.0, 1.0};
  const auto & v = poly.vertices;
  const std::size_t n = v.size();
  const Segment pq{p, q};
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Segment edge{v[j], v[i]};
    if (!segments_intersect(pq, edge)) {
      continue;
    }
    const double d1 = cross(edge.a, edge.b, p);
    const double d2 = cross(edge.a, edge.b, q);
    if (d1 == 0.0 && d2 == 0.0) {
      cuts.push_back(std::clamp(param_on(p, q, edge.a), 0.0, 1.0));
      cuts.push_back(std::clamp(param_on(p, q, edge.b), 0.0, 1.0));
    } else {
      cuts.push_back(std::clamp(d1 / (d1 - d2), 0.0, 1.0));
    }
  }
  std::sort(cuts.begin(), cuts.end());
  const Point d = q - p;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k + 1] <= cuts[k]) {
      continue;
    }
    const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
    if (strictly_inside(p + mid * d, poly)) {
      return true;
    }
  }
  return false;
}

bool line_of_sight(Point p, Point q, std::span<const Polygon> obstacles)
{
  return std::none_of(obstacles.begin(), obstacles.end(), [&](const Polygon & poly) {
    return segment_crosses_interior(p, q, poly);
  });
}

bool is_simple_polygon(const Polygon & poly)
{
  const auto & v = poly.vertices;
  const std::size_t n = v.size();
  if (n < 3) {
    return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] == v[(i + 1) % n]) {
      return false;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Segment e{v[i], v[(i + 1) % n]};
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      const Segment f{v[j], v[(j + 1) % n]};
      if (adjacent) {
        // Neighbours share one vertex; they may only overlap if they fold back.
        const Point shared = (j == i + 1) ? e.b : e.a;
        const Point e_other = (j == i + 1) ? e.a : e.b;
        const Point f_other = (j == i + 1) ? f.b : f.a;
        if (cross(shared, e_other, f_other) == 0.0 &&
            dot(e_other - shared, f_other - shared) > 0.0) {
          return false;
        }
        continue;
      }
      if (segments_intersect(e, f)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace p2v
