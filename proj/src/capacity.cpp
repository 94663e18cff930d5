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

#include "gmumimo/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gmumimo/error.hpp"
#include "gmumimo/quadrature.hpp"

namespace gmumimo {

double scalar_mutual_information(const Constellation& c, double rho, double tol) {
    if (rho <= 0.0) return 0.0;
    if (c.is_gaussian()) return std::log1p(rho);
    return integrate([&](double r) { return omega_S(c, r); }, 0.0, rho, tol).value;
}

double capacity_potential(const SingularSpectrum& spectrum, const Constellation& c, double snr,
                          const FixedPoint& fp) {
    double logdet = 0.0;
    for (double lam : spectrum.eigenvalues()) logdet += std::log(1.0 / fp.v_star + snr * lam);
    return logdet / static_cast<double>(spectrum.n) + std::log(omega_S(c, fp.rho_star)) +
           scalar_mutual_information(c, fp.rho_star);
}

FixedPoint capacity_fixed_point(const SingularSpectrum& spectrum, const Constellation& c, double snr,
                                bool* unique) {
    const auto res = find_fixed_point(spectrum, snr, c);
    if (unique) *unique = res.unique();
    if (res.unique()) return res.primary;
    FixedPoint best = res.candidates.front();
    double best_f = capacity_potential(spectrum, c, snr, best);
    for (std::size_t i = 1; i < res.candidates.size(); ++i) {
        const double f = capacity_potential(spectrum, c, snr, res.candidates[i]);
        if (f < best_f) {
            best_f = f;
            best = res.candidates[i];
        }
    }
    return best;
}

OmegaAxResult omega_Ax_detail(const SingularSpectrum& spectrum, const Constellation& c, double snr) {
    OmegaAxResult out;
    if (snr <= 0.0) return out;
    out.fixed_point = capacity_fixed_point(spectrum, c, snr, &out.unique);
    const auto& fp = out.fixed_point;
    out.value = fp.rho_star * omega_S(c, fp.rho_star) / snr;
    const double t = 1.0 / fp.v_star;
    out.value_alt = omega_L_complement(spectrum, snr, t) / snr;
    if (std::abs(out.value - out.value_alt) > 1e-8) {
        std::ostringstream os;
        os << "omega_Ax: fixed-point forms disagree at snr = " << snr << " (" << out.value << " vs "
           << out.value_alt << ")";
        throw Error(ErrorCode::numerical, os.str());
    }
    return out;
}

double omega_Ax(const SingularSpectrum& spectrum, const Constellation& c, double snr) {
    return omega_Ax_detail(spectrum, c, snr).value;
}

namespace {

double omega_Ax_node(const SingularSpectrum& spectrum, const Constellation& c, double s) {
    try {
        return omega_Ax(spectrum, c, s);
    } catch (const NoFixedPointError& e) {
        throw NodeFailureError(e.what(), s);
    }
}

} // namespace

std::vector<double> locate_capacity_jumps(const SingularSpectrum& spectrum, const Constellation& c,
                                          double snr_max, std::size_t grid) {
    std::vector<double> jumps;
    if (!(snr_max > 0.0) || c.is_gaussian() || grid < 4) return jumps;
    std::vector<double> x(grid + 1);
    std::vector<double> y(grid + 1);
    for (std::size_t i = 0; i <= grid; ++i) {
        x[i] = snr_max * static_cast<double>(i) / static_cast<double>(grid);
        y[i] = omega_Ax_node(spectrum, c, x[i]);
    }
    for (std::size_t i = 0; i < grid; ++i) {
        const double d = std::abs(y[i + 1] - y[i]);
        const double left = i > 0 ? std::abs(y[i] - y[i - 1]) : 0.0;
        const double right = i + 1 < grid ? std::abs(y[i + 2] - y[i + 1]) : 0.0;
        if (d < 1e-4 || d < 4.0 * std::max(left, right)) continue;
        double a = x[i], b = x[i + 1], fa = y[i], fb = y[i + 1];
        while (b - a > 1e-13 * b) {
            const double m = 0.5 * (a + b);
            if (!(m > a && m < b)) break;
            const double fm = omega_Ax_node(spectrum, c, m);
            if (std::abs(fm - fa) >= std::abs(fb - fm)) {
                b = m;
                fb = fm;
            } else {
                a = m;
                fa = fm;
            }
        }
        // A smooth steep stretch collapses to a vanishing step; only keep real jumps.
        if (std::abs(fb - fa) > 0.1 * d) jumps.push_back(0.5 * (a + b));
    }
    return jumps;
}

double constrained_capacity_integral(const SingularSpectrum& spectrum, const Constellation& c, double snr,
                                     double tol) {
    if (snr <= 0.0) return 0.0;
    const auto jumps = locate_capacity_jumps(spectrum, c, snr);
    return integrate([&](double s) { return omega_Ax_node(spectrum, c, s); }, 0.0, snr, tol, jumps).value;
}

double constrained_capacity_closed_form(const SingularSpectrum& spectrum, const Constellation& c, double snr) {
    if (snr <= 0.0) return 0.0;
    const auto fp = capacity_fixed_point(spectrum, c, snr);
    return static_cast<double>(spectrum.n) * capacity_potential(spectrum, c, snr, fp);
}

double achievable_rate_area(const SingularSpectrum& spectrum, const Constellation& c, double snr, double tol) {
    if (snr <= 0.0) return 0.0;
    auto s_curve = [&](double rho) { return omega_S(c, rho); };
    if (spectrum.is_flat()) return integrate(s_curve, 0.0, snr, tol).value;
    const double rho1 = phi_L(spectrum, snr, 1.0);
    double total = rho1 > 0.0 ? integrate(s_curve, 0.0, rho1, 0.5 * tol).value : 0.0;
    std::vector<double> breaks;
    try {
        for (const auto& fp : find_fixed_point(spectrum, snr, c).candidates)
            if (fp.rho_star > rho1 && fp.rho_star < snr) breaks.push_back(fp.rho_star);
    } catch (const NoFixedPointError&) {
    }
    auto m_curve = [&](double rho) {
        const double s = omega_S(c, rho);
        return std::min(s, varphi_L(spectrum, snr, std::clamp(rho, rho1, snr)));
    };
    total += integrate(m_curve, rho1, snr, 0.5 * tol, breaks).value;
    return total;
}

CapacityReport capacity_report(const SingularSpectrum& spectrum, const Constellation& c, double snr, double tol) {
    return capacity_sweep(spectrum, c, {snr}, tol).front();
}

std::vector<CapacityReport> capacity_sweep(const SingularSpectrum& spectrum, const Constellation& c,
                                           const std::vector<double>& snrs, double tol) {
    if (snrs.empty()) return {};
    for (double s : snrs)
        if (!(s >= 0.0) || !std::isfinite(s)) throw Error(ErrorCode::invalid_argument, "capacity: snr must be >= 0");
    std::vector<std::size_t> order(snrs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return snrs[a] < snrs[b]; });
    const double snr_max = snrs[order.back()];
    const auto jumps = locate_capacity_jumps(spectrum, c, snr_max);
    auto f = [&](double s) { return omega_Ax_node(spectrum, c, s); };

    std::vector<CapacityReport> out(snrs.size());
    double prev = 0.0;
    double acc = 0.0;
    // Each segment gets a share of the tolerance proportional to its length.
    for (std::size_t idx : order) {
        const double snr = snrs[idx];
        if (snr > prev) acc += integrate(f, prev, snr, tol * (snr - prev) / snr_max, jumps).value;
        prev = snr;
        CapacityReport& r = out[idx];
        r.snr = snr;
        r.c_bar = acc;
        r.c_sum = static_cast<double>(spectrum.n) * r.c_bar;
        r.r_bar_oamp = achievable_rate_area(spectrum, c, snr, tol);
        if (snr > 0.0) {
            const auto ax = omega_Ax_detail(spectrum, c, snr);
            r.fixed_point = ax.fixed_point;
            r.unique = ax.unique;
            r.dual_form_gap = std::abs(ax.value - ax.value_alt);
            r.c_closed_form =
                static_cast<double>(spectrum.n) * capacity_potential(spectrum, c, snr, r.fixed_point);
        }
    }
    return out;
}

} // namespace gmumimo
