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

#include <cstddef>
#include <span>
#include <vector>

#include "gmumimo/types.hpp"

namespace gmumimo {

/// K users with N_u antennas each, split into G equal contiguous groups. A
/// user's symbol stream of length N_u * L fills its antennas over L slots:
/// symbol q goes to antenna u*N_u + q % N_u in slot q / N_u.
struct UserLayout {
    std::size_t users = 1;
    std::size_t antennas_per_user = 1;
    std::size_t groups = 1;
    std::size_t slots = 1;

    std::size_t n() const { return users * antennas_per_user; }
    std::size_t users_per_group() const { return users / groups; }
    std::size_t group_of_user(std::size_t u) const { return u / users_per_group(); }
    std::size_t symbols_per_user() const { return antennas_per_user * slots; }
    void validate() const;
};

/// N x L block from per-user symbol streams.
CMatrix place_symbols(const UserLayout& layout, const std::vector<std::vector<cplx>>& streams);

/// Symbol stream of user u read back from an N x L block.
std::vector<cplx> gather_symbols(const UserLayout& layout, const CMatrix& block, std::size_t u);

/// Writes a user stream into an N x L block.
void scatter_symbols(const UserLayout& layout, std::span<const cplx> stream, std::size_t u, CMatrix& block);

} // namespace gmumimo
