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

#include "gmumimo/multiuser.hpp"

#include "gmumimo/error.hpp"

namespace gmumimo {

void UserLayout::validate() const {
    if (users == 0 || antennas_per_user == 0 || groups == 0 || slots == 0)
        throw Error(ErrorCode::config, "layout: users, antennas per user, groups and slots must be positive");
    if (users % groups != 0) throw Error(ErrorCode::config, "layout: G must divide K");
}

CMatrix place_symbols(const UserLayout& layout, const std::vector<std::vector<cplx>>& streams) {
    if (streams.size() != layout.users) throw Error(ErrorCode::framing, "place_symbols: one stream per user");
    CMatrix block(static_cast<Eigen::Index>(layout.n()), static_cast<Eigen::Index>(layout.slots));
    for (std::size_t u = 0; u < layout.users; ++u) scatter_symbols(layout, streams[u], u, block);
    return block;
}

void scatter_symbols(const UserLayout& layout, std::span<const cplx> stream, std::size_t u, CMatrix& block) {
    if (stream.size() != layout.symbols_per_user())
        throw Error(ErrorCode::framing, "scatter_symbols: stream length must be N_u * L");
    const std::size_t nu = layout.antennas_per_user;
    for (std::size_t q = 0; q < stream.size(); ++q)
        block(static_cast<Eigen::Index>(u * nu + q % nu), static_cast<Eigen::Index>(q / nu)) = stream[q];
}

std::vector<cplx> gather_symbols(const UserLayout& layout, const CMatrix& block, std::size_t u) {
    const std::size_t nu = layout.antennas_per_user;
    std::vector<cplx> out(layout.symbols_per_user());
    for (std::size_t q = 0; q < out.size(); ++q)
        out[q] = block(static_cast<Eigen::Index>(u * nu + q % nu), static_cast<Eigen::Index>(q / nu));
    return out;
}

} // namespace gmumimo
