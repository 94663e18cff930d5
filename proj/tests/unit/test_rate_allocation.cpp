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

#include <cmath>
#include <numeric>

#include "gmumimo/error.hpp"
#include "gmumimo/random.hpp"
#include "gmumimo/rate_allocation.hpp"

using namespace gmumimo;

TEST_CASE("allocation config coefficients") {
    AllocationConfig cfg{{2.0, 1.0, 0.5}, 1.3};
    for (std::size_t g = 0; g < 3; ++g) {
        CHECK(cfg.b(g, g) == 1.0);
        CHECK(cfg.c(g, g) == 0.0);
    }
    CHECK(cfg.b(0, 1) == 0.5);
    CHECK(cfg.c(0, 1) == doctest::Approx(0.65));
    CHECK_THROWS_AS((AllocationConfig{{1.0, 0.0}, 1.2}).validate(), Error);
    CHECK_THROWS_AS((AllocationConfig{{1.0, 1.0}, 0.8}).validate(), Error);
}

TEST_CASE("two-group closed form") {
    // gamma = (2, 1), c* = 1: v_1 = 1/(1 + t/2), v_2 = 1/(1 + t), average 0.5 at t = 2 + 2 sqrt 2.
    const AllocationConfig cfg{{2.0, 1.0}, 1.0};
    const auto v = solve_group_variances(cfg, 0.5);
    CHECK(v[0] == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
    CHECK(v[1] == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
    CHECK_THROWS_AS(solve_group_variances(cfg, 1.2), RangeError);
    CHECK_THROWS_AS(solve_group_variances(cfg, 0.0), RangeError);
    const auto top = solve_group_variances(cfg, 1.0);
    CHECK(top[0] == doctest::Approx(1.0));
    CHECK(top[1] == doctest::Approx(1.0));
}

TEST_CASE("group variances round trip and ordering") {
    Rng rng(21);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t groups = 2 + rng.index(3);
        AllocationConfig cfg{{}, 1.0 + 2.0 * rng.uniform()};
        for (std::size_t g = 0; g < groups; ++g) cfg.gammas.push_back(std::exp(3.0 * (rng.uniform() - 0.5)));
        const double v = (0.02 + 0.97 * rng.uniform()) / cfg.c_star;
        const auto vg = solve_group_variances(cfg, v);
        CHECK(std::accumulate(vg.begin(), vg.end(), 0.0) / static_cast<double>(groups) ==
              doctest::Approx(v).epsilon(1e-12));
        // gamma_i (1/v_i - c*) is shared; larger gamma gets the larger variance.
        const double t = cfg.gammas[0] * (1.0 / vg[0] - cfg.c_star);
        for (std::size_t g = 0; g < groups; ++g) {
            CHECK(cfg.gammas[g] * (1.0 / vg[g] - cfg.c_star) == doctest::Approx(t).epsilon(1e-9));
            for (std::size_t h = 0; h < groups; ++h)
                if (cfg.gammas[g] > cfg.gammas[h]) CHECK(vg[g] >= vg[h]);
        }
    }
}

TEST_CASE("clipped allocation") {
    const AllocationConfig cfg{{8.0, 1.0}, 1.0};
    const auto v = solve_clipped_group_variances(cfg, 0.4, 0.5);
    CHECK(v[0] <= 0.5 + 1e-15);
    CHECK((v[0] + v[1]) / 2.0 == doctest::Approx(0.4).epsilon(1e-12));
    try {
        solve_clipped_group_variances(cfg, 0.6, 0.5);
        FAIL("expected infeasible");
    } catch (const InfeasibleAllocationError& e) {
        CHECK(e.binding_groups().size() == 2);
        CHECK(std::isnan(e.rho()));  // no rho context at this level
    }
}

TEST_CASE("omega_C_star") {
    const auto s = make_conditioned_spectrum(128, 192, 50.0);
    const auto q = Constellation::qpsk();
    const double snr = db_to_linear(10.0);
    const auto fp = find_fixed_point(s, snr, q);
    CHECK(omega_C_star(s, q, snr, snr) == 0.0);
    CHECK(omega_C_star(s, q, snr, 2.0 * snr) == 0.0);
    const double below = fp.primary.rho_star * 0.5;
    CHECK(omega_C_star(s, q, snr, below) == omega_S(q, below));
    const double above = fp.primary.rho_star * 1.05;
    CHECK(omega_C_star(s, q, snr, above) == doctest::Approx(varphi_L(s, snr, above)).epsilon(1e-12));
}

TEST_CASE("Property 1 on the grid and rate invariance") {
    const auto s = make_conditioned_spectrum(128, 192, 50.0);
    const auto q = Constellation::qpsk();
    const double snr = db_to_linear(6.0);
    const auto sym = group_mmse_curves(s, q, snr, make_allocation(s, q, snr, {1.0, 1.0}), 128);
    const auto sym_rates = group_rates(s, q, sym, 192);
    CHECK(sym_rates.per_group[0] == doctest::Approx(sym_rates.r_bar).epsilon(1e-6));
    CHECK(sym_rates.per_group[1] == doctest::Approx(sym_rates.r_bar).epsilon(1e-6));

    const auto alloc = make_allocation(s, q, snr, {3.0, 1.0, 0.4});
    const auto curves = group_mmse_curves(s, q, snr, alloc, 128);
    for (std::size_t i = 0; i < curves.rho_grid.size(); ++i) {
        const double rho = curves.rho_grid[i];
        double avg = 0.0;
        for (std::size_t g = 0; g < 3; ++g) {
            CHECK(curves.v[g][i] >= 0.0);
            CHECK(curves.v[g][i] <= omega_S(q, rho) + 1e-12);
            if (i > 0) CHECK(curves.v[g][i] <= curves.v[g][i - 1] + 1e-12);
            avg += curves.v[g][i] / 3.0;
        }
        CHECK(std::abs(avg - curves.omega_c_star[i]) <= 1e-9);
    }
    const auto rates = group_rates(s, q, curves, 192);
    CHECK(rates.sum == doctest::Approx(sym_rates.sum).epsilon(1e-6));
    CHECK(rates.per_group[0] > rates.per_group[1]);
    CHECK(rates.per_group[1] > rates.per_group[2]);
}
