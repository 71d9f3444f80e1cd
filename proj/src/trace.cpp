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

#include "p2v/trace.hpp"

#include "p2v/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

namespace p2v
{

namespace
{

constexpr std::string_view kHeader = "t,id,kind,x,y,heading_deg,speed";

int decimals_for_step(double step)
{
  int d = 0;
  double scaled = step;
  while (d < 9 && std::abs(scaled - std::round(scaled)) > 1e-9 * std::max(1.0, scaled)) {
    scaled *= 10.0;
    ++d;
  }
  return d;
}

}  // namespace

char kind_code(EntityKind k) { return k == EntityKind::vehicle ? 'V' : 'P'; }

const EntityState * Frame::find(const std::string & id) const
{
  const auto it = std::lower_bound(
    states.begin(), states.end(), id,
    [](const EntityState & s, const std::string & key) { return s.id < key; });
  if (it == states.end() || it->id != id) {
    return nullptr;
  }
  return &*it;
}

std::int64_t tick_of(double t, double step)
{
  const double q = t / step;
  const auto tick = static_cast<std::int64_t>(std::llround(q));
  if (!std::isfinite(q) || std::abs(q - static_cast<double>(tick)) > 1e-6) {
    throw TraceError("time " + csv::format_double(t) + " is not on the " +
                     csv::format_double(step) + " s step grid");
  }
  return tick;
}

TraceSequence TraceSequence::from_frames(double step, std::vector<Frame> frames)
{
  if (!(step > 0.0)) {
    throw TraceError("trace step must be positive");
  }
  while (!frames.empty() && frames.back().states.empty()) {
    frames.pop_back();
  }
  auto first_nonempty = std::find_if(
    frames.begin(), frames.end(), [](const Frame & f) { return !f.states.empty(); });
  frames.erase(frames.begin(), first_nonempty);

  TraceSequence seq;
  seq.step_ = step;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    Frame & f = frames[k];
    if (f.tick < 0) {
      throw TraceError("frame at negative time");
    }
    if (k > 0 && f.tick != frames[k - 1].tick + 1) {
      throw TraceError(
        "non-uniform timestep between t=" + csv::format_double(frames[k - 1].t) +
        " and t=" + csv::format_double(f.t));
    }
    f.t = seq.time_of(f.tick);
    std::sort(f.states.begin(), f.states.end(), [](const auto & a, const auto & b) {
      return a.id < b.id;
    });
    for (std::size_t i = 0; i < f.states.size(); ++i) {
      const EntityState & s = f.states[i];
      if (i > 0 && f.states[i - 1].id == s.id) {
        throw TraceError("duplicate id '" + s.id + "' at t=" + csv::format_double(f.t));
      }
      if (!(s.speed >= 0.0)) {
        throw TraceError("negative speed for '" + s.id + "' at t=" + csv::format_double(f.t));
      }
      if (!std::isfinite(s.pos.x) || !std::isfinite(s.pos.y)) {
        throw TraceError("non-finite position for '" + s.id + "' at t=" + csv::format_double(f.t));
      }
      auto [it, inserted] = seq.lifetimes_.try_emplace(s.id, Lifetime{s.kind, f.tick, f.tick});
      if (!inserted) {
        Lifetime & life = it->second;
        if (life.kind != s.kind) {
          throw TraceError("id '" + s.id + "' changes kind at t=" + csv::format_double(f.t));
        }
        if (life.exit_tick != f.tick - 1) {
          throw TraceError("id '" + s.id + "' reappears after exit at t=" + csv::format_double(f.t));
        }
        life.exit_tick = f.tick;
      }
    }
  }
  seq.frames_ = std::move(frames);
  return seq;
}

const Frame & TraceSequence::frame_at_tick(std::int64_t tick) const
{
  if (frames_.empty() || tick < first_tick() || tick > last_tick()) {
    throw TraceError("t=" + csv::format_double(time_of(tick)) + " outside trace horizon");
  }
  return frames_[static_cast<std::size_t>(tick - first_tick())];
}

const Frame & TraceSequence::frame_at(double t) const { return frame_at_tick(tick_of(t, step_)); }

const Lifetime & TraceSequence::lifetime(const std::string & id) const
{
  const auto it = lifetimes_.find(id);
  if (it == lifetimes_.end()) {
    throw TraceError("unknown entity id '" + id + "'");
  }
  return it->second;
}

std::size_t TraceSequence::count(EntityKind kind) const
{
  return static_cast<std::size_t>(std::count_if(
    lifetimes_.begin(), lifetimes_.end(), [kind](const auto & kv) { return kv.second.kind == kind; }));
}

TraceSequence read_trace(std::istream & in, double step)
{
  std::string line;
  if (!std::getline(in, line)) {
    throw TraceError("trace: empty input");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  if (line != kHeader) {
    throw TraceError("trace: expected header '" + std::string(kHeader) + "'");
  }

  std::map<std::int64_t, Frame> by_tick;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") {
      continue;
    }
    const auto where = "trace line " + std::to_string(line_no) + ": ";
    const auto fields = csv::split(line);
    if (fields.size() != 7) {
      throw TraceError(where + "expected 7 fields");
    }
    auto num = [&](std::size_t i, const char * name) {
      const auto v = csv::parse_double(fields[i]);
      if (!v) {
        throw TraceError(where + "bad " + name + " '" + std::string(fields[i]) + "'");
      }
      return *v;
    };
    const double t = num(0, "t");
    std::int64_t tick = 0;
    try {
      tick = tick_of(t, step);
    } catch (const TraceError & e) {
      throw TraceError(where + "non-uniform timestep: " + e.what());
    }
    EntityState s;
    s.id = std::string(fields[1]);
    if (s.id.empty()) {
      throw TraceError(where + "empty id");
    }
    if (fields[2] == "V") {
      s.kind = EntityKind::vehicle;
    } else if (fields[2] == "P") {
      s.kind = EntityKind::pedestrian;
    } else {
      throw TraceError(where + "kind must be V or P");
    }
    s.pos = {num(3, "x"), num(4, "y")};
    s.heading = Heading(num(5, "heading_deg"));
    s.speed = num(6, "speed");
    if (!(s.speed >= 0.0)) {
      throw TraceError(where + "negative speed for '" + s.id + "'");
    }
    Frame & f = by_tick[tick];
    f.tick = tick;
    f.states.push_back(std::move(s));
  }

  // Empty frames cannot be written as rows, so a gap is accepted only when nobody
  // straddles it; otherwise the sampling itself is non-uniform.
  std::vector<Frame> frames;
  for (auto & [tick, frame] : by_tick) {
    if (!frames.empty() && tick != frames.back().tick + 1) {
      std::set<std::string> before;
      for (const auto & s : frames.back().states) {
        before.insert(s.id);
      }
      const bool straddles = std::any_of(
        frame.states.begin(), frame.states.end(),
        [&](const EntityState & s) { return before.count(s.id) > 0; });
      if (straddles) {
        throw TraceError(
          "trace: non-uniform timestep between t=" + csv::format_double(frames.back().t) +
          " and t=" + csv::format_double(static_cast<double>(tick) * step));
      }
      for (std::int64_t k = frames.back().tick + 1; k < tick; ++k) {
        frames.push_back(Frame{k, static_cast<double>(k) * step, {}});
      }
    }
    frame.t = static_cast<double>(tick) * step;
    frames.push_back(std::move(frame));
  }
  try {
    return TraceSequence::from_frames(step, std::move(frames));
  } catch (const TraceError & e) {
    throw TraceError(std::string("trace: ") + e.what());
  }
}

TraceSequence load_trace(const std::filesystem::path & path, double step)
{
  std::ifstream in(path);
  if (!in) {
    throw TraceError(path.string() + ": cannot open trace file");
  }
  try {
    return read_trace(in, step);
  } catch (const TraceError & e) {
    throw TraceError(path.string() + ": " + e.what());
  }
}

void write_trace(const TraceSequence & trace, std::ostream & out)
{
  const int decimals = decimals_for_step(trace.step());
  out << kHeader << '\n';
  for (const Frame & f : trace.frames()) {
    const std::string t = csv::format_fixed(f.t, decimals);
    for (const EntityState & s : f.states) {
      out << t << ',' << s.id << ',' << kind_code(s.kind) << ',' << csv::format_double(s.pos.x)
          << ',' << csv::format_double(s.pos.y) << ',' << csv::format_double(s.heading.degrees())
          << ',' << csv::format_double(s.speed) << '\n';
    }
  }
}

void save_trace(const TraceSequence & trace, const std::filesystem::path & path)
{
  std::ofstream out(path);
  if (!out) {
    throw TraceError(path.string() + ": cannot write trace file");
  }
  write_trace(trace, out);
}

}  // namespace p2v
