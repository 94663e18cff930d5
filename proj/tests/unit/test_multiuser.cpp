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

#include "doctest.h"

#include "gmumimo/error.hpp"
#include "gmumimo/multiuser.hpp"

using namespace gmumimo;

TEST_CASE("layout validation") {
    CHECK_NOTHROW((UserLayout{4, 3, 2, 5}).validate());
    CHECK_THROWS_AS((UserLayout{4, 3, 3, 5}).validate(), Error);
    CHECK_THROWS_AS((UserLayout{0, 3, 1, 5}).validate(), Error);
    const UserLayout l{6, 2, 3, 4};
    CHECK(l.n() == 12);
    CHECK(l.users_per_group() == 2);
    CHECK(l.group_of_user(0) == 0);
    CHECK(l.group_of_user(3) == 1);
    CHECK(l.group_of_user(5) == 2);
    CHECK(l.symbols_per_user() == 8);
}

TEST_CASE("symbol placement round trip") {
    const UserLayout l{3, 2, 1, 4};
    std::vector<std::vector<cplx>> streams(3);
    for (std::size_t u = 0; u < 3; ++u)
        for (std::size_t q = 0; q < l.symbols_per_user(); ++q)
            streams[u].push_back(cplx(static_cast<double>(u), static_cast<double>(q)));
    const CMatrix block = place_symbols(l, streams);
    CHECK(block.rows() == 6);
    CHECK(block.cols() == 4);
    // Symbol q of user u sits on antenna u*N_u + q % N_u in slot q / N_u.
    CHECK(block(2 * 1 + 1, 2) == cplx(1.0, 5.0));
    for (std::size_t u = 0; u < 3; ++u) CHECK(gather_symbols(l, block, u) == streams[u]);

    CMatrix other = CMatrix::Zero(6, 4);
    scatter_symbols(l, streams[2], 2, other);
    CHECK(gather_symbols(l, other, 2) == streams[2]);
    CHECK(other.topRows(4).cwiseAbs().maxCoeff() == 0.0);
}
