// SPDX-License-Identifier: Apache-2.0
//
// u2v-chansim: LiDAR-aided UAV-to-vehicle channel simulation toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef U2V_RNG_HPP
#define U2V_RNG_HPP

#include <cstdint>
#include <random>

namespace u2v
{
    // splitmix64 finalizer
    constexpr std::uint64_t mix64(std::uint64_t x)
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Seed of an independent substream identified by (seed, a, b)
    constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0)
    {
        return mix64(mix64(mix64(seed) ^ a) ^ (b * 0xd6e8feb86659fd93ULL));
    }

    using Rng = std::mt19937_64;

    inline Rng make_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0)
    {
        return Rng(substream_seed(seed, a, b));
    }
}

#endif
