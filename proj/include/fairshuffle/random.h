// Copyright 2026 The Fairshuffle Authors
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

#ifndef FAIRSHUFFLE_RANDOM_H_
#define FAIRSHUFFLE_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace fairshuffle {

// All randomness in the library flows from std::mt19937_64 (bit-exact across
// standard libraries) through Boost.Random distributions (header-only, so
// identical across platforms for a given Boost release).
using Rng = std::mt19937_64;

// Stream labels mixed into derived seeds so that planning, batching and
// shuffling never share a generator stream.
enum class SeedDomain : std::uint64_t {
  kBatching = 1,
  kAttributeGroups = 2,
  kShufflerAssignment = 3,
  kShuffle = 4,
  kRrEstimate = 5,
  kSynth = 6,
  kSplit = 7,
};

// SplitMix64 finalizer.
std::uint64_t Mix64(std::uint64_t x);

// Derives a child seed from a master seed and a path of integer coordinates:
//
//   h = Mix64(master)
//   for each p in path: h = Mix64(h ^ Mix64(p + 0x9e3779b97f4a7c15))
//
// The function is part of the reproducibility contract: shuffles recorded
// with one release replay bit-identically with any later release.
std::uint64_t DeriveSeed(std::uint64_t master,
                         std::initializer_list<std::uint64_t> path);

std::uint64_t DeriveSeed(std::uint64_t master, SeedDomain domain,
                         std::initializer_list<std::uint64_t> path);

// Uniform integer in [0, n). Requires n > 0.
std::size_t UniformIndex(Rng& rng, std::size_t n);

// Uniformly random permutation of {0, ..., n-1} (Fisher-Yates); each of the
// n! outcomes has probability 1/n!.
std::vector<std::size_t> UniformPermutation(Rng& rng, std::size_t n);

// In-place Fisher-Yates over an arbitrary vector.
template <typename T>
void ShuffleInPlace(Rng& rng, std::vector<T>& values) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = UniformIndex(rng, i);
    std::swap(values[i - 1], values[j]);
  }
}

// k distinct indices drawn uniformly without replacement from [0, n),
// in draw order.
std::vector<std::size_t> SampleWithoutReplacement(Rng& rng, std::size_t n,
                                                  std::size_t k);

}  // namespace fairshuffle

#endif  // FAIRSHUFFLE_RANDOM_H_
