// Copyright 2026 The mcsep Authors
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

// Seed derivation. Every random stream in the toolkit is a child of one
// master seed, addressed by a stream name and an index, so that results do
// not depend on the order in which streams are consumed.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace mcsep::util {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t child_seed(std::uint64_t master, std::string_view stream, std::uint64_t index = 0) {
  return splitmix64(splitmix64(master ^ fnv1a(stream)) + index);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t master, std::string_view stream, std::uint64_t index = 0) {
  return Rng(child_seed(master, stream, index));
}

/// Uniform double in [lo, hi) built from raw engine output, so the sequence is
/// identical across standard library implementations.
inline double uniform(Rng& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

/// Uniform integer in [0, n).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) { return rng() % n; }

/// Standard normal deviate (Box-Muller, one value per call).
inline double gaussian(Rng& rng) {
  const double u1 = 1.0 - uniform(rng, 0.0, 1.0);
  const double u2 = uniform(rng, 0.0, 1.0);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace mcsep::util
