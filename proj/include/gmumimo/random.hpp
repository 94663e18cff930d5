// SPDX-License-Identifier: Apache-2.0
//
// gmumimo: coded generalized MU-MIMO detection and capacity toolkit
// Copyright (C) 2026 The gmumimo authors
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

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "gmumimo/types.hpp"

namespace gmumimo {

/// Seeded generator with portable distributions.
///
/// The engine is std::mt19937_64 (bit-exact by the standard); distributions
/// come from Boost.Random so draws do not depend on the standard library
/// vendor. Independent streams are derived from a base seed and a tuple of
/// counters, which is how parallel Monte-Carlo trials stay reproducible for
/// any worker count.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream);

    double gaussian() { return normal_(engine_); }
    /// Circularly-symmetric complex normal with E|z|^2 = variance.
    cplx complex_gaussian(double variance = 1.0);
    double uniform() { return uniform_(engine_); }
    std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }
    std::size_t index(std::size_t size);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    boost::random::normal_distribution<double> normal_{0.0, 1.0};
    boost::random::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace gmumimo
