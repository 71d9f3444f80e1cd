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

/**
 * @file rng.hpp
 * @brief Named, seedable substreams.
 *
 * Every consumer of randomness asks for its own engine keyed by (run seed, stream name,
 * key), typically the entity id. Streams never share state, so adding an entity or a
 * consumer cannot perturb the draws seen by any other one.
 */

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace p2v::rng
{

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// 64-bit FNV-1a; stable across platforms, unlike std::hash.
inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL)
{
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::string_view name, std::string_view key = {})
{
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ fnv1a(name));
  h = splitmix64(h ^ fnv1a(key, 0x84222325cbf29ce4ULL));
  return h;
}

inline Engine stream(std::uint64_t seed, std::string_view name, std::string_view key = {})
{
  std::seed_seq seq{
    static_cast<std::uint32_t>(stream_seed(seed, name, key)),
    static_cast<std::uint32_t>(stream_seed(seed, name, key) >> 32)};
  return Engine(seq);
}

inline double uniform(Engine & eng, double lo, double hi)
{
  return std::uniform_real_distribution<double>(lo, hi)(eng);
}

inline bool bernoulli(Engine & eng, double p) { return std::bernoulli_distribution(p)(eng); }

inline double normal(Engine & eng, double mean, double sd)
{
  return std::normal_distribution<double>(mean, sd)(eng);
}

/// Uniform integer in [0, n).
inline std::size_t index(Engine & eng, std::size_t n)
{
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng);
}

}  // namespace p2v::rng
