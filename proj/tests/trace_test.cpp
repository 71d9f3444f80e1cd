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

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace p2v
{
namespace
{

using test::frame;
using test::pedestrian;
using test::vehicle;

constexpr const char * kHeader = "t,id,kind,x,y,heading_deg,speed\n";

TraceSequence parse(const std::string & body)
{
  std::istringstream in(kHeader + body);
  return read_trace(in);
}

TEST(LoadTrace, ThreeFramesOneVehicle)
{
  const TraceSequence trace = parse(
    "0.0,v1,V,0,0,0,10\n"
    "0.1,v1,V,1,0,0,10\n"
    "0.2,v1,V,2,0,0,10\n");
  EXPECT_EQ(trace.frames().size(), 3u);
  EXPECT_DOUBLE_EQ(trace.entry_time("v1"), 0.0);
  EXPECT_DOUBLE_EQ(trace.exit_time("v1"), 0.2);
  EXPECT_EQ(trace.count(EntityKind::vehicle), 1u);
  EXPECT_EQ(trace.count(EntityKind::pedestrian), 0u);
}

TEST(LoadTrace, GapWithSameEntityIsNonUniformStep)
{
  try {
    parse(
      "0.0,v1,V,0,0,0,10\n"
      "0.1,v1,V,1,0,0,10\n"
      "0.3,v1,V,3,0,0,10\n");
    FAIL() << "expected a non-uniform timestep error";
  } catch (const TraceError & e) {
    EXPECT_NE(std::string(e.what()).find("non-uniform"), std::string::npos) << e.what();
  }
}

TEST(LoadTrace, OffGridTimeIsNonUniformStep)
{
  EXPECT_THROW(parse("0.0,v1,V,0,0,0,10\n0.15,v1,V,1,0,0,10\n"), TraceError);
}

TEST(LoadTrace, GapNobodyStraddlesIsEmptyFrames)
{
  const TraceSequence trace = parse(
    "0.0,v1,V,0,0,0,10\n"
    "0.3,p1,P,1,0,0,1\n");
  ASSERT_EQ(trace.frames().size(), 4u);
  EXPECT_TRUE(trace.frame_at_tick(1).states.empty());
  EXPECT_TRUE(trace.frame_at_tick(2).states.empty());
}

TEST(LoadTrace, SameIdAsVehicleAndPedestrianIsDuplicate)
{
  try {
    parse("0.0,x,V,0,0,0,10\n0.0,x,P,1,1,0,1\n");
    FAIL() << "expected a duplicate-id error";
  } catch (const TraceError & e) {
    EXPECT_NE(std::string(e.what()).find("duplicate id"), std::string::npos) << e.what();
  }
}

TEST(LoadTrace, ReappearingIdRejected)
{
  EXPECT_THROW(
    parse(
      "0.0,v1,V,0,0,0,10\n0.0,p1,P,0,5,0,1\n"
      "0.1,p1,P,0,5,0,1\n"
      "0.2,v1,V,2,0,0,10\n0.2,p1,P,0,5,0,1\n"),
    TraceError);
}

TEST(LoadTrace, NegativeSpeedRejected)
{
  EXPECT_THROW(parse("0.0,v1,V,0,0,0,-1\n"), TraceError);
}

TEST(LoadTrace, BadHeaderRejected)
{
  std::istringstream in("time,id\n0,v1\n");
  EXPECT_THROW(read_trace(in), TraceError);
}

TEST(LoadTrace, MissingFileNamesPath)
{
  try {
    load_trace("/nonexistent/trace.csv");
    FAIL();
  } catch (const TraceError & e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/trace.csv"), std::string::npos);
  }
}

TEST(FrameAt, Examples)
{
  const TraceSequence trace = parse("0.0,v1,V,0,0,0,10\n0.1,v1,V,1,0,0,10\n");
  EXPECT_EQ(trace.frame_at(0.0).tick, 0);
  EXPECT_THROW(trace.frame_at(0.05), TraceError);
  EXPECT_THROW(trace.frame_at(0.5), TraceError);
  EXPECT_EQ(trace.frame_at(0.1).states.front().pos.x, 1.0);
}

TEST(TickOf, AcceptsFloatingNoiseOnly)
{
  EXPECT_EQ(tick_of(0.30000000000000004, 0.1), 3);
  EXPECT_EQ(tick_of(12.3, 0.1), 123);
  EXPECT_THROW(tick_of(0.34, 0.1), TraceError);
}

TEST(FromFrames, SortsStatesAndTrimsEmptyEnds)
{
  std::vector<Frame> frames{
    frame(0, {}),
    frame(1, {vehicle("v2", {0, 0}), pedestrian("p1", {1, 1})}),
    frame(2, {vehicle("v2", {1, 0})}),
    frame(3, {}),
  };
  const TraceSequence trace = TraceSequence::from_frames(0.1, frames);
  EXPECT_EQ(trace.first_tick(), 1);
  EXPECT_EQ(trace.last_tick(), 2);
  EXPECT_EQ(trace.frames().front().states.front().id, "p1");
  EXPECT_EQ(trace.lifetime("p1").exit_tick, 1);
  EXPECT_NE(trace.frames().front().find("v2"), nullptr);
  EXPECT_EQ(trace.frames().front().find("zz"), nullptr);
}

TEST(FromFrames, NonConsecutiveTicksRejected)
{
  EXPECT_THROW(
    TraceSequence::from_frames(0.1, {frame(0, {vehicle("v", {0, 0})}), frame(2, {vehicle("v", {1, 0})})}), TraceError);
}

TEST(FromFrames, KindChangeRejected)
{
  EXPECT_THROW(
    TraceSequence::from_frames(
      0.1, {frame(0, {vehicle("x", {0, 0})}), frame(1, {pedestrian("x", {0, 0})})}),
    TraceError);
}

TEST(WriteTrace, RoundTripIsExact)
{
  const TraceSequence trace = TraceSequence::from_frames(
    0.1, {frame(0, {vehicle("v1", {0.1 + 0.2, -3.5}, 12.25, 13.89), pedestrian("p1", {1.0 / 3.0, 2}, 271.5, 1.44)}),
          frame(1, {vehicle("v1", {1.6, -3.5}, 12.25, 13.0)})});
  std::stringstream buf;
  write_trace(trace, buf);
  EXPECT_EQ(read_trace(buf), trace);
}

}  // namespace
}  // namespace p2v
