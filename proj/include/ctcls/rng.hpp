// Copyright 2026 The ctclassify Authors
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

#ifndef CTCLS_RNG_HPP
#define CTCLS_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace ctcls {

// All randomness in the pipeline flows through these helpers instead of the
// std distributions, whose output is implementation-defined. Every sequence
// here is a pure function of the seed bits.

/// splitmix64 finalizer; derives independent streams from one seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return std::mt19937_64(mix_seed(seed, stream));
}

/// Uniform double in [lo, hi) from the top 53 bits of one draw.
inline double uniform_real(std::mt19937_64& g, double lo, double hi) {
  const double u = static_cast<double>(g() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

inline bool bernoulli(std::mt19937_64& g, double p) {
  return uniform_real(g, 0.0, 1.0) < p;
}

/// Uniform integer in [0, n); n must be > 0.
inline std::size_t uniform_index(std::mt19937_64& g, std::size_t n) {
  // Multiply-shift; bias is < 2^-53 for the sizes used here.
  return static_cast<std::size_t>(uniform_real(g, 0.0, 1.0) *
                                  static_cast<double>(n));
}

/// Fisher-Yates shuffle with the deterministic index helper.
template <typename T>
void shuffle_in_place(std::vector<T>& v, std::mt19937_64& g) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = uniform_index(g, i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace ctcls

#endif  // CTCLS_RNG_HPP
