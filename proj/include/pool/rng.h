//
// Copyright 2026 The POOL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef POOL_RNG_H_
#define POOL_RNG_H_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

namespace pool {

// All randomness flows through mt19937_64, whose output sequence is fixed by
// the standard. Distributions are implemented here rather than taken from
// <random> so that results do not depend on the standard library vendor.
using Rng = std::mt19937_64;

constexpr uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives a child seed from a root seed and an ordered list of keys. This is
// the split function used everywhere a worker or a table cell needs its own
// stream: the result depends only on (root, keys), never on call order.
inline uint64_t DeriveSeed(uint64_t root, std::initializer_list<uint64_t> keys) {
  uint64_t h = SplitMix64(root);
  for (uint64_t k : keys) h = SplitMix64(h ^ SplitMix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng MakeRng(uint64_t seed) { return Rng(SplitMix64(seed)); }

// Uniform on [0, 1) with 53 random bits.
inline double BitsToUnit(uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double Uniform01(Rng& rng) { return BitsToUnit(rng()); }

inline double UniformRange(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * Uniform01(rng);
}

// Box-Muller on two 53-bit uniforms; the first uniform is shifted off zero.
inline double BoxMuller(uint64_t bits_a, uint64_t bits_b) {
  const double u1 = (static_cast<double>(bits_a >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = BitsToUnit(bits_b);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

inline double StandardNormal(Rng& rng) {
  const uint64_t a = rng();
  const uint64_t b = rng();
  return BoxMuller(a, b);
}

// Counter-based standard normal: a pure function of the key.
inline double KeyedStandardNormal(uint64_t key) {
  const uint64_t a = SplitMix64(key);
  const uint64_t b = SplitMix64(a ^ 0xd1b54a32d192ed03ULL);
  return BoxMuller(a, b);
}

}  // namespace pool

#endif  // POOL_RNG_H_
