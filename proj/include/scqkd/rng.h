// Copyright 2026 The scqkd Authors
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

#ifndef SCQKD_RNG_H
#define SCQKD_RNG_H

#include <cstdint>
#include <string_view>

namespace scqkd {

/// Splittable pseudo-random generator: xoshiro256** seeded through splitmix64.
///
/// Every protocol round gets its own stream derived from (seed, stream id), so
/// the random draws of a round never depend on which worker ran it or in what
/// order. Doubles are produced from the top 53 bits, which keeps output
/// identical across standard library implementations.
class Rng {
   public:
    static constexpr std::string_view NAME = "xoshiro256ss-splitmix64/v1";

    explicit Rng(uint64_t seed);

    /// Independent stream for (seed, stream).
    static Rng for_stream(uint64_t seed, uint64_t stream);

    uint64_t next_u64();
    /// Uniform in [0, 1).
    double uniform();
    bool coin();
    /// Uniform in [0, n). n must be positive.
    uint64_t below(uint64_t n);

   private:
    uint64_t s_[4];
};

/// Stream ids at or above this value are reserved for session-level draws
/// (test-set selection), so they never collide with round indices.
constexpr uint64_t RESERVED_STREAM_BASE = 0xFFFF'FFFF'0000'0000ULL;
constexpr uint64_t SIFT_STREAM = RESERVED_STREAM_BASE + 1;

}  // namespace scqkd

#endif
