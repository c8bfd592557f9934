// SPDX-License-Identifier: Apache-2.0
//
// csivis - angular-delay CSI imaging and channel estimation workbench
// Copyright (C) 2026 The csivis authors
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

#ifndef csivis_seeding_H
#define csivis_seeding_H

#include <cstdint>
#include <random>

namespace csivis
{
    // SplitMix64 finalizer; used to decorrelate nearby integer seeds.
    std::uint64_t mix_seed(std::uint64_t x);

    // Per-trial seed: master seed XOR trial index.
    inline std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index)
    {
        return master_seed ^ trial_index;
    }

    // Independent sub-stream of a seed, e.g. "paths" vs "noise" of the same trial.
    std::uint64_t substream(std::uint64_t seed, std::uint64_t stream_tag);

    // Engine used by every stochastic operation in the library.
    using Rng = std::mt19937_64;

    inline Rng make_rng(std::uint64_t seed)
    {
        return Rng(mix_seed(seed));
    }

    // Counter-based standard normal draw: a pure function of (key, counter).
    double hashed_normal(std::uint64_t key, std::uint64_t counter);

    namespace stream
    {
        inline constexpr std::uint64_t paths = 0x70617468;
        inline constexpr std::uint64_t noise = 0x6e6f6973;
        inline constexpr std::uint64_t covariance = 0x636f7661;
        inline constexpr std::uint64_t shuffle = 0x73687566;
        inline constexpr std::uint64_t init = 0x696e6974;
        inline constexpr std::uint64_t split = 0x73706c74;
    }
}

#endif
