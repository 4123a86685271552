// Copyright 2026 The acls Authors. All rights reserved.
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

#include <cstddef>
#include <cstdint>
#include <vector>

namespace acls {

// SplitMix64 (Steele, Lea, Flood 2014). Used to expand a single seed into
// generator state.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}
  uint64_t next();

 private:
  uint64_t state_;
};

// xoshiro256** 1.0 (Blackman, Vigna 2018), seeded by four SplitMix64 draws.
// All shuffling and initialization in the project runs on this generator so
// results do not depend on the standard library's distributions.
class Prng {
 public:
  explicit Prng(uint64_t seed);

  uint64_t next();

  // Uniform integer in [0, bound) by rejection (no modulo bias).
  uint64_t uniform_index(uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  uint64_t s_[4];
};

// Fisher-Yates, walking i from n-1 down to 1 and swapping i with
// uniform_index(i + 1).
std::vector<size_t> shuffled_indices(size_t n, uint64_t seed);

}  // namespace acls
