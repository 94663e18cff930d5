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

#include "gmumimo/rate_allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gmumimo/capacity.hpp"
#include "gmumimo/error.hpp"
#include "gmumimo/quadrature.hpp"

namespace gmumimo {

double omega_C_star(const SingularSpectrum& spectrum, const Constellation& c, double snr, double rho) {
    if (rho >= snr) return 0.0;
    return std::min(omega_S(c, rho), varphi_L_or_inf(spectrum, snr, rho));
}

void AllocationConfig::validate() const {
    if (gammas.empty()) throw Error(ErrorCode::invalid_argument, "allocation: at least one group required");
    for (double g : gammas)
        if (!(g > 0.0) || !std::isfinite(g)) throw Error(ErrorCode::invalid_argument, "allocation: gammas must be > 0");
    if (!(c_star >= 1.0) || !std::isfinite(c_star))
        throw Error(ErrorCode::invalid_argument, "allocation: c* must be >= 1 for a unit-power prior");
}

double group_variance(const AllocationConfig& cfg, std::size_t g, double t) {
    return 1.0 / (cfg.c_star + t / cfg.gammas[g]);
}

namespace {

// Smallest t >= 0 with A(t) <= v for the decreasing map A; A(0) >= v is assumed.
template <class F>
double solve_common_parameter(const F& average, double v, double t_hi) {
    double lo = 0.0;
    double hi = t_hi;
    while (average(hi) > v) hi *= 2.0;
    for (int it = 0; it < 300 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (average(mid) > v ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

std::vector<double> solve_group_variances(const AllocationConfig& cfg, double v) {
    cfg.validate();
    const double v_max = 1.0 / cfg.c_star;
    if (!(v > 0.0) || v > v_max * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "solve_group_variances: v = " << v << " outside (0, " << v_max << "]";
        throw RangeError(os.str(), 0.0, v_max);
    }
    const std::size_t G = cfg.groups();
    std::vector<double> out(G, v_max);
    if (v >= v_max) return out;
    auto average = [&](double t) {
        double acc = 0.0;
        for (std::size_t g = 0; g < G; ++g) acc += group_variance(cfg, g, t);
        return acc / static_cast<double>(G);
    };
    double gsum = 0.0;
    for (double g : cfg.gammas) gsum += g;
    const double t = solve_common_parameter(average, v, gsum / (static_cast<double>(G) * v));
    for (std::size_t g = 0; g < G; ++g) out[g] = group_variance(cfg, g, t);
    return out;
}

std::vector<double> solve_clipped_group_variances(const AllocationConfig& cfg, double v, double cap) {
    cfg.validate();
    const std::size_t G = cfg.groups();
    if (v > cap * (1.0 + 1e-12)) {
        std::vector<std::size_t> all(G);
        for (std::size_t g = 0; g < G; ++g) all[g] = g;
        std::ostringstream os;
        os << "allocation infeasible: average " << v << " exceeds the per-group cap " << cap;
        throw InfeasibleAllocationError(os.str(), std::numeric_limits<double>::quiet_NaN(), all);
    }
    if (!(v > 0.0)) return std::vector<double>(G, 0.0);
    const double v_max = 1.0 / cfg.c_star;
    const double hi_cap = std::min(cap, v_max);
    auto clipped = [&](std::size_t g, double t) { return std::min(group_variance(cfg, g, t), hi_cap); };
    auto average = [&](double t) {
        double acc = 0.0;
        for (std::size_t g = 0; g < G; ++g) acc += clipped(g, t);
        return acc / static_cast<double>(G);
    };
    std::vector<double> out(G, hi_cap);
    if (v >= average(0.0)) {
        if (v > average(0.0) * (1.0 + 1e-12)) {
            std::vector<std::size_t> all(G);
            for (std::size_t g = 0; g < G; ++g) all[g] = g;
            throw InfeasibleAllocationError("allocation infeasible: every group is at its cap", 0.0, all);
        }
        return out;
    }
    double gsum = 0.0;
    for (double g : cfg.gammas) gsum += g;
    const double t = solve_common_parameter(average, v, gsum / (static_cast<double>(G) * v));
    for (std::size_t g = 0; g < G; ++g) out[g] = clipped(g, t);
    return out;
}

AllocationConfig make_allocation(const SingularSpectrum& spectrum, const Constellation& c, double snr,
                                 std::vector<double> gammas) {
    const auto fp = find_fixed_point(spectrum, snr, c).primary;
    AllocationConfig cfg{std::move(gammas), 1.0 / omega_S(c, fp.rho_star)};
    cfg.validate();
    return cfg;
}

std::vector<double> group_variances_at(const SingularSpectrum& spectrum, const Constellation& c, double snr,
                                       const AllocationConfig& cfg, double rho_star, double rho) {
    const std::size_t G = cfg.groups();
    if (rho >= snr) return std::vector<double>(G, 0.0);
    const double s = omega_S(c, rho);
    if (rho < rho_star) return std::vector<double>(G, s);
    const double v = std::min(s, varphi_L_or_inf(spectrum, snr, rho));
    return solve_clipped_group_variances(cfg, v, s);
}

GroupCurves group_mmse_curves(const SingularSpectrum& spectrum, const Constellation& c, double snr,
                              const AllocationConfig& cfg, std::size_t points) {
    cfg.validate();
    GroupCurves out;
    out.snr = snr;
    out.cfg = cfg;
    out.rho_star = find_fixed_point(spectrum, snr, c).primary.rho_star;
    out.rho_grid = default_rho_grid(snr, points);
    out.rho_grid.push_back(out.rho_star);
    std::sort(out.rho_grid.begin(), out.rho_grid.end());
    out.rho_grid.erase(std::unique(out.rho_grid.begin(), out.rho_grid.end()), out.rho_grid.end());
    const std::size_t G = cfg.groups();
    out.v.assign(G, {});
    for (double rho : out.rho_grid) {
        const auto vg = group_variances_at(spectrum, c, snr, cfg, out.rho_star, rho);
        double avg = 0.0;
        for (std::size_t g = 0; g < G; ++g) {
            out.v[g].push_back(vg[g]);
            avg += vg[g];
        }
        out.average.push_back(avg / static_cast<double>(G));
        out.omega_c_star.push_back(omega_C_star(spectrum, c, snr, rho));
    }
    return out;
}

GroupRates group_rates(const SingularSpectrum& spectrum, const Constellation& c, const GroupCurves& curves,
                       std::size_t n_antennas, double tol) {
    const std::size_t G = curves.cfg.groups();
    const double snr = curves.snr;
    std::vector<double> breaks{curves.rho_star};
    if (!spectrum.is_flat()) breaks.push_back(phi_L(spectrum, snr, 1.0));
    try {
        for (const auto& fp : find_fixed_point(spectrum, snr, c).candidates) breaks.push_back(fp.rho_star);
    } catch (const NoFixedPointError&) {
    }
    GroupRates out;
    for (std::size_t g = 0; g < G; ++g) {
        auto f = [&](double rho) {
            return group_variances_at(spectrum, c, snr, curves.cfg, curves.rho_star, rho)[g];
        };
        out.per_group.push_back(integrate(f, 0.0, snr, tol / static_cast<double>(G), breaks).value);
    }
    out.r_bar = achievable_rate_area(spectrum, c, snr, tol);
    double avg = 0.0;
    for (double r : out.per_group) avg += r;
    avg /= static_cast<double>(G);
    out.sum = static_cast<double>(n_antennas) * avg;
    out.sum_rate_gap = std::abs(avg - out.r_bar);
    if (out.sum_rate_gap > 2.0 * tol) {
        std::ostringstream os;
        os << "group_rates: sum-rate identity violated, |mean R_Cg - R_bar| = " << out.sum_rate_gap;
        throw Error(ErrorCode::numerical, os.str());
    }
    return out;
}

} // namespace gmumimo
