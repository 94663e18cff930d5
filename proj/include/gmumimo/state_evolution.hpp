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

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "gmumimo/channel.hpp"
#include "gmumimo/constellation.hpp"

namespace gmumimo {

/// LD transfer rho = phi_L(v) = [Omega_L(1/v)]^{-1} - 1/v, v in (0, 1].
double phi_L(const SingularSpectrum& spectrum, double snr, double v);

/// Interval of rho covered by phi_L on v in (0, 1]: [phi_L(1), snr].
struct LdRange {
    double lo;
    double hi;
};
LdRange ld_range(const SingularSpectrum& spectrum, double snr);

/// Generalized inverse of phi_L on (0, 1]. For a flat spectrum (phi_L
/// constant) the largest preimage v = 1 is returned; rho = snr maps to 0 on
/// a non-flat spectrum (the v -> 0 limit). Throws RangeError outside ld_range.
double phi_L_inverse(const SingularSpectrum& spectrum, double snr, double rho);

/// LD curve in the (rho, v) chart: varphi_L(rho) = (rho + 1/phi_L^inv(rho))^{-1}.
double varphi_L(const SingularSpectrum& spectrum, double snr, double rho);

/// varphi_L, or +infinity below ld_range (the LD imposes no constraint there).
double varphi_L_or_inf(const SingularSpectrum& spectrum, double snr, double rho);

/// NLD transfer: v = ([Omega(rho)]^{-1} - rho)^{-1}, evaluated as Omega/(1 - rho*Omega).
double nld_variance(double omega, double rho);

struct FixedPoint {
    double rho_star = 0.0;
    double v_star = 0.0;
};

struct FixedPointResult {
    /// The crossing reached by the SE recursion from v = 1 (smallest rho).
    FixedPoint primary;
    /// Every crossing found by the scan, ordered by increasing rho.
    std::vector<FixedPoint> candidates;
    bool unique() const { return candidates.size() == 1; }
};

/// Intersections of Omega_S and varphi_L, scanned along the LD curve and
/// refined by bisection. Throws NoFixedPointError when the scan finds none.
FixedPointResult find_fixed_point(const SingularSpectrum& spectrum, double snr, const Constellation& c);

struct SeStep {
    int iter;
    double rho;
    double v;
};

/// SE recursion from v_0 = 1: rho_t = phi_L(v_{t-1}), v_t = nld_variance(Omega_S(rho_t), rho_t).
/// Stops after max_iters or when |v_t - v_{t-1}| <= tol.
std::vector<SeStep> se_trajectory(const SingularSpectrum& spectrum, double snr, const Constellation& c,
                                  int max_iters, double tol = 0.0);

/// NLD MMSE curve rho -> v (for example a measured code transfer curve).
using NldCurve = std::function<double(double)>;

struct ThresholdOptions {
    double eps_gap = 1e-6;         ///< required margin varphi_L - nld, in v units
    double decoded_floor = 1e-10;  ///< nld values at or below this count as decoded
    double tol_db = 1e-3;
    std::size_t ld_points = 2048;
};

/// True when nld stays strictly below varphi_L (by eps_gap) until it reaches the decoded floor.
bool tunnel_open(const SingularSpectrum& spectrum, double snr, const NldCurve& nld,
                 const ThresholdOptions& opt = {});

/// Smallest snr in [snr_lo, snr_hi] (linear) with an open tunnel, by bisection
/// in dB. Returns +infinity when the tunnel is closed over the whole range.
double se_threshold(const SingularSpectrum& spectrum, double snr_lo, double snr_hi, const NldCurve& nld,
                    const ThresholdOptions& opt = {});

/// {0} followed by `points` log-spaced values over [1e-4 snr, snr].
std::vector<double> default_rho_grid(double snr, std::size_t points = 512);

struct TransferChart {
    std::vector<double> rho_grid;
    std::vector<double> ld_curve;     ///< varphi_L, saturated at 1 where the LD is unconstrained
    std::vector<double> nld_curve;    ///< Omega_S
    std::vector<double> opt_curve;    ///< min{Omega_S, varphi_L} below snr, 0 from snr on
    double snr = 0.0;
    std::string spectrum_id;
    std::string constellation;
};

TransferChart build_chart(const SingularSpectrum& spectrum, double snr, const Constellation& c,
                          std::string spectrum_id, std::size_t points = 512);

} // namespace gmumimo
