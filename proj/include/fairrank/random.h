// Copyright 2026 The FairRank Authors.
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

// Reproducible randomness. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; uniforms are formed from the top 53
// bits by hand because std::uniform_real_distribution is not portable across
// standard libraries. Seeds for independent streams are derived with
// SplitMix64 so any (seed, stream, index) triple maps to one generator state.

#ifndef FAIRRANK_RANDOM_H_
#define FAIRRANK_RANDOM_H_

#include <cstdint>
#include <random>

namespace fairrank {

using Rng = std::mt19937_64;

constexpr std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t index = 0) {
  return SplitMix64(SplitMix64(SplitMix64(seed) ^ stream) ^ index);
}

// Uniform on [0, 1).
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace fairrank

#endif  // FAIRRANK_RANDOM_H_
