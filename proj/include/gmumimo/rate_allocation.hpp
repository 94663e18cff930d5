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
#include <vector>

#include "gmumimo/channel.hpp"
#include "gmumimo/constellation.hpp"
#include "gmumimo/state_evolution.hpp"

namespace gmumimo {

/// min{Omega_S(rho), varphi_L(rho)} for rho < snr, 0 from snr on.
double omega_C_star(const SingularSpectrum& spectrum, const Constellation& c, double snr, double rho);

/// Group weights with the common offset c* = 1/Omega_S(rho*). Group variances
/// satisfy gamma_i (1/v_i - c*) = gamma_g (1/v_g - c*) = t for a shared t >= 0.
struct AllocationConfig {
    std::vector<double> gammas;
    double c_star = 1.0;

    std::size_t groups() const { return gammas.size(); }
    double b(std::size_t i, std::size_t g) const { return gammas[g] / gammas[i]; }
    double c(std::size_t i, std::size_t g) const { return (1.0 - b(i, g)) * c_star; }
    void validate() const;
};

/// Variance of group g at common parameter t: (c* + t/gamma_g)^{-1}.
double group_variance(const AllocationConfig& cfg, std::size_t g, double t);

/// Per-group variances whose average is v, v in (0, 1/c*]. Throws RangeError outside.
std::vector<double> solve_group_variances(const AllocationConfig& cfg, double v);

/// As solve_group_variances with every v_g capped at `cap`; clipped groups stay at the
/// cap and the average is restored over the others. Throws InfeasibleAllocationError
/// (naming every group) when v > cap.
std::vector<double> solve_clipped_group_variances(const AllocationConfig& cfg, double v, double cap);

/// Allocation for the fixed point at snr: c* from the SE-reachable crossing.
AllocationConfig make_allocation(const SingularSpectrum& spectrum, const Constellation& c, double snr,
                                 std::vector<double> gammas);

/// v_g(rho) for every group: Omega_S below rho*, clipped allocation of Omega_C* on [rho*, snr), 0 beyond.
std::vector<double> group_variances_at(const SingularSpectrum& spectrum, const Constellation& c, double snr,
                                       const AllocationConfig& cfg, double rho_star, double rho);

struct GroupCurves {
    double snr = 0.0;
    double rho_star = 0.0;
    AllocationConfig cfg;
    std::vector<double> rho_grid;
    std::vector<std::vector<double>> v;   ///< v[g][i] on rho_grid
    std::vector<double> average;
    std::vector<double> omega_c_star;
};

GroupCurves group_mmse_curves(const SingularSpectrum& spectrum, const Constellation& c, double snr,
                              const AllocationConfig& cfg, std::size_t points = 512);

struct GroupRates {
    std::vector<double> per_group;   ///< R_Cg = int_0^snr v_g, nats per antenna
    double sum = 0.0;                ///< (N/G) sum_g R_Cg
    double r_bar = 0.0;              ///< int_0^snr Omega_C*
    double sum_rate_gap = 0.0;         ///< |(1/G) sum_g R_Cg - r_bar|
};

/// Per-group rates by adaptive quadrature of the exact group curves.
/// Throws Error(numerical) when the sum-rate identity misses by more than 2 tol.
GroupRates group_rates(const SingularSpectrum& spectrum, const Constellation& c, const GroupCurves& curves,
                       std::size_t n_antennas, double tol = 1e-6);

} // namespace gmumimo
