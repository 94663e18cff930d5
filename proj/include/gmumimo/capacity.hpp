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

#include "gmumimo/channel.hpp"
#include "gmumimo/constellation.hpp"
#include "gmumimo/state_evolution.hpp"

#include <vector>

namespace gmumimo {

/// Capacity quantities are per transmit antenna and in nats unless the name says otherwise.
struct OmegaAxResult {
    double value = 1.0;       ///< rho* Omega_S(rho*) / snr
    double value_alt = 1.0;   ///< (1 - Omega_L(1/v*)/v*) / snr
    FixedPoint fixed_point;
    bool unique = true;
};

/// Per-antenna replica potential at a candidate fixed point:
/// (1/N) sum_i log(1/v + snr lam_i) + log Omega_S(rho) + int_0^rho Omega_S.
double capacity_potential(const SingularSpectrum& spectrum, const Constellation& c, double snr,
                          const FixedPoint& fp);

/// Fixed point used by the capacity formulas: the only crossing when unique,
/// otherwise the candidate with the smallest potential.
FixedPoint capacity_fixed_point(const SingularSpectrum& spectrum, const Constellation& c, double snr,
                                bool* unique = nullptr);

/// Replica MMSE of Ax from both fixed-point expressions. Throws Error(numerical)
/// when they disagree by more than 1e-8.
OmegaAxResult omega_Ax_detail(const SingularSpectrum& spectrum, const Constellation& c, double snr);
double omega_Ax(const SingularSpectrum& spectrum, const Constellation& c, double snr);

/// SNR values in (0, snr_max) where Omega_Ax jumps because the selected fixed
/// point switches branch. Found on a uniform scan of `grid` nodes and refined by bisection.
std::vector<double> locate_capacity_jumps(const SingularSpectrum& spectrum, const Constellation& c,
                                          double snr_max, std::size_t grid = 256);

/// C_bar = int_0^snr Omega_Ax. A node whose fixed point cannot be found raises NodeFailureError.
double constrained_capacity_integral(const SingularSpectrum& spectrum, const Constellation& c, double snr,
                                     double tol = 1e-6);

/// Closed-form sum capacity log|B(v*)| + N(log Omega_S(rho*) + int_0^rho* Omega_S), N = spectrum.n.
double constrained_capacity_closed_form(const SingularSpectrum& spectrum, const Constellation& c, double snr);

/// R_bar = int_0^snr min{Omega_S, varphi_L}.
double achievable_rate_area(const SingularSpectrum& spectrum, const Constellation& c, double snr,
                            double tol = 1e-6);

/// int_0^rho Omega_S: the scalar-channel mutual information at snr rho.
double scalar_mutual_information(const Constellation& c, double rho, double tol = 1e-10);

struct CapacityReport {
    double snr = 0.0;
    double c_bar = 0.0;
    double c_sum = 0.0;
    double c_closed_form = 0.0;   ///< sum capacity
    double r_bar_oamp = 0.0;
    FixedPoint fixed_point;
    bool unique = true;
    double dual_form_gap = 0.0;
};

/// Reports at every snr (any order); C_bar is accumulated over consecutive segments.
std::vector<CapacityReport> capacity_sweep(const SingularSpectrum& spectrum, const Constellation& c,
                                           const std::vector<double>& snrs, double tol = 1e-6);

CapacityReport capacity_report(const SingularSpectrum& spectrum, const Constellation& c, double snr,
                               double tol = 1e-6);

} // namespace gmumimo
