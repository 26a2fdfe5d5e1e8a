// Copyright 2026 The bvspeed Authors
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

#include <cstdint>
#include <random>

namespace bvspeed {

/// Named substreams derived from the master seed.
enum class StreamPurpose : std::uint64_t {
  Simulation = 1,
  Bootstrap = 2,
  Readout = 3,
  Synthetic = 4,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the stream (master, purpose, id, index); a pure function of its arguments.
inline std::uint64_t stream_seed(std::uint64_t master, StreamPurpose purpose, std::uint64_t id, std::uint64_t index) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  h = splitmix64(h ^ id);
  return splitmix64(h ^ index);
}

inline std::mt19937_64 make_stream(std::uint64_t master, StreamPurpose purpose, std::uint64_t id, std::uint64_t index) {
  return std::mt19937_64(stream_seed(master, purpose, id, index));
}

/// Uniform double in [0,1) from the top 53 bits; identical on every platform.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double standard_normal(std::mt19937_64& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline std::uint64_t binomial(std::mt19937_64& rng, std::uint64_t n, double p) {
  if (p <= 0.0 || n == 0) return 0;
  if (p >= 1.0) return n;
  return std::binomial_distribution<std::uint64_t>(n, p)(rng);
}

}  // namespace bvspeed
