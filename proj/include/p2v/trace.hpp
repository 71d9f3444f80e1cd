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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace p2v
{

enum class EntityKind { vehicle, pedestrian };

char kind_code(EntityKind k);

struct EntityState
{
  std::string id;
  EntityKind kind{EntityKind::vehicle};
  Point pos;
  Heading heading;
  double speed{0.0};

  friend bool operator==(const EntityState &, const EntityState &) = default;
};

/// Snapshot at one grid time. `states` is sorted by id.
struct Frame
{
  std::int64_t tick{0};
  double t{0.0};
  std::vector<EntityState> states;

  const EntityState * find(const std::string & id) const;

  friend bool operator==(const Frame &, const Frame &) = default;
};

struct Lifetime
{
  EntityKind kind{EntityKind::vehicle};
  std::int64_t entry_tick{0};
  std::int64_t exit_tick{0};  // last tick present

  friend bool operator==(const Lifetime &, const Lifetime &) = default;
};

class TraceError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Frames on a uniform step grid. Every entity occupies one contiguous tick interval.
class TraceSequence
{
public:
  static constexpr double kDefaultStep = 0.1;

  TraceSequence() = default;

  /// Validates and takes ownership. Frames must be on consecutive ticks; states within a
  /// frame are sorted here. Leading and trailing empty frames are dropped.
  static TraceSequence from_frames(double step, std::vector<Frame> frames);

  double step() const { return step_; }
  const std::vector<Frame> & frames() const { return frames_; }
  bool empty() const { return frames_.empty(); }

  std::int64_t first_tick() const { return frames_.empty() ? 0 : frames_.front().tick; }
  std::int64_t last_tick() const { return frames_.empty() ? -1 : frames_.back().tick; }
  double time_of(std::int64_t tick) const { return static_cast<double>(tick) * step_; }

  /// Throws TraceError for off-grid or out-of-horizon times.
  const Frame & frame_at(double t) const;
  const Frame & frame_at_tick(std::int64_t tick) const;

  const std::map<std::string, Lifetime> & lifetimes() const { return lifetimes_; }
  const Lifetime & lifetime(const std::string & id) const;
  double entry_time(const std::string & id) const { return time_of(lifetime(id).entry_tick); }
  double exit_time(const std::string & id) const { return time_of(lifetime(id).exit_tick); }

  std::size_t count(EntityKind kind) const;

  friend bool operator==(const TraceSequence &, const TraceSequence &) = default;

private:
  double step_{kDefaultStep};
  std::vector<Frame> frames_;
  std::map<std::string, Lifetime> lifetimes_;
};

/// Grid index of t, or throws if t is not within 1e-6 of a grid point.
std::int64_t tick_of(double t, double step);

TraceSequence read_trace(std::istream & in, double step = TraceSequence::kDefaultStep);
TraceSequence load_trace(
  const std::filesystem::path & path, double step = TraceSequence::kDefaultStep);

void write_trace(const TraceSequence & trace, std::ostream & out);
void save_trace(const TraceSequence & trace, const std::filesystem::path & path);

}  // namespace p2v
