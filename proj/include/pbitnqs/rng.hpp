// Copyright 2026 The pbit-nqs developers
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once
#include <cstdint>

namespace pbitnqs {

// Counter-based uniform stream built on the SplitMix64 output function.
// Draw k of the stream is finalize(seed + (k+1)*gamma), i.e. random access
// into the SplitMix64 sequence. Each draw is a pure function of (seed,
// counter), so a p-bit update scheduled on any thread sees the same random
// number for its (sweep, bit) slot. That is what makes colored parallel
// sweeps bit-identical to their serial execution.
class CounterRng {
public:
    explicit constexpr CounterRng(uint64_t seed = 0) : seed_(seed) {}

    constexpr uint64_t bits(uint64_t counter) const {
        uint64_t z = seed_ + (counter + 1) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform on the open interval (-1, +1). The half-ulp offset keeps the
    // endpoints strictly excluded.
    double uniform_pm1(uint64_t counter) const {
        const double u = (static_cast<double>(bits(counter) >> 11) + 0.5) *
                         (1.0 / 9007199254740992.0);  // 2^-53
        return 2.0 * u - 1.0;
    }

    constexpr uint64_t seed() const { return seed_; }

private:
    uint64_t seed_ = 0;
};

}  // namespace pbitnqs
