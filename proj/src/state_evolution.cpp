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

#include "gmumimo/state_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gmumimo/error.hpp"

namespace gmumimo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// phi_L without the v <= 1 restriction; t = 1/v.
double phi_L_at_precision(const SingularSpectrum& spectrum, double snr, double t) {
    return omega_L_complement(spectrum, snr, t) / omega_L(spectrum, snr, t);
}

} // namespace

double phi_L(const SingularSpectrum& spectrum, double snr, double v) {
    if (!(v > 0.0 && v <= 1.0)) throw Error(ErrorCode::invalid_argument, "phi_L: v must be in (0, 1]");
    return phi_L_at_precision(spectrum, snr, 1.0 / v);
}

LdRange ld_range(const SingularSpectrum& spectrum, double snr) {
    return {phi_L(spectrum, snr, 1.0), snr};
}

double phi_L_inverse(const SingularSpectrum& spectrum, double snr, double rho) {
    const auto range = ld_range(spectrum, snr);
    const double slack = 1e-12 * std::max(1.0, snr);
    if (spectrum.is_flat()) {
        if (std::abs(rho - snr) <= slack) return 1.0;
        std::ostringstream os;
        os << "phi_L_inverse: flat spectrum only attains rho = snr = " << snr;
        throw RangeError(os.str(), snr, snr);
    }
    if (rho < range.lo - slack || rho > range.hi + slack) {
        std::ostringstream os;
        os << "phi_L_inverse: rho = " << rho << " outside attainable [" << range.lo << ", " << range.hi << "]";
        throw RangeError(os.str(), range.lo, range.hi);
    }
    if (rho <= range.lo) return 1.0;
    if (rho >= range.hi) return 0.0;
    // phi_L is decreasing in v; bisect on ln v.
    double lo = std::log(1e-300);
    double hi = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (phi_L_at_precision(spectrum, snr, std::exp(-mid)) > rho)
            lo = mid;
        else
            hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

double varphi_L(const SingularSpectrum& spectrum, double snr, double rho) {
    const double v = phi_L_inverse(spectrum, snr, rho);
    if (v == 0.0) return 0.0;
    // (rho + 1/v)^{-1} equals Omega_L(1/v) on the curve; this form is exact at the fixed point.
    return v / (1.0 + rho * v);
}

double varphi_L_or_inf(const SingularSpectrum& spectrum, double snr, double rho) {
    const auto range = ld_range(spectrum, snr);
    if (rho < range.lo && !(spectrum.is_flat() && std::abs(rho - snr) <= 1e-12 * std::max(1.0, snr)))
        return kInf;
    if (spectrum.is_flat() && rho < snr - 1e-12 * std::max(1.0, snr)) return kInf;
    return varphi_L(spectrum, snr, rho);
}

double nld_variance(double omega, double rho) {
    const double den = 1.0 - rho * omega;
    if (!(den > 0.0)) throw Error(ErrorCode::non_contracting, "NLD output variance undefined: Omega >= 1/rho");
    return omega / den;
}

FixedPointResult find_fixed_point(const SingularSpectrum& spectrum, double snr, const Constellation& c) {
    if (!(snr > 0.0)) throw Error(ErrorCode::invalid_argument, "find_fixed_point: snr must be > 0");

    // Along the LD curve parametrized by v: rho(v) = phi_L(v), v_LD(v) = Omega_L(1/v).
    // A crossing is a root of h(v) = Omega_S(rho(v)) - v_LD(v).
    struct Sample {
        double v;
        double h;
        int sign;
    };
    auto eval = [&](double v) {
        const double t = 1.0 / v;
        const double rho = phi_L_at_precision(spectrum, snr, t);
        const double nld = omega_S(c, rho);
        const double ld = omega_L(spectrum, snr, t);
        const double h = nld - ld;
        const double scale = std::max(nld, ld);
        const int sign = std::abs(h) <= 1e-13 * scale ? 0 : (h > 0 ? 1 : -1);
        return Sample{v, h, sign};
    };

    // Any crossing has v* >= Omega_S(rho*) >= Omega_S(snr).
    const double v_lo = std::max(0.5 * omega_S(c, snr), 1e-300);
    constexpr std::size_t kGrid = 512;
    std::vector<Sample> grid;
    grid.reserve(kGrid);
    const double l0 = std::log(v_lo);
    for (std::size_t i = 0; i < kGrid; ++i) {
        const double v = i + 1 == kGrid ? 1.0 : std::exp(l0 * (1.0 - static_cast<double>(i) / (kGrid - 1)));
        grid.push_back(eval(v));
    }

    std::vector<double> roots;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i].sign == 0) {
            if (roots.empty() || i == 0 || grid[i - 1].sign != 0) roots.push_back(grid[i].v);
            continue;
        }
        if (i + 1 < grid.size() && grid[i + 1].sign != 0 && grid[i].sign != grid[i + 1].sign) {
            double lo = std::log(grid[i].v);
            double hi = std::log(grid[i + 1].v);
            const int s_lo = grid[i].sign;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
                const double mid = 0.5 * (lo + hi);
                const auto sm = eval(std::exp(mid));
                if (sm.sign == 0) {
                    lo = hi = mid;
                    break;
                }
                (sm.sign == s_lo ? lo : hi) = mid;
            }
            roots.push_back(std::exp(0.5 * (lo + hi)));
        }
    }
    if (roots.empty()) {
        bool below = std::all_of(grid.begin(), grid.end(), [](const Sample& s) { return s.sign < 0; });
        std::ostringstream os;
        os << "find_fixed_point: no crossing of Omega_S and varphi_L at snr = " << snr
           << (below ? " (Omega_S lies below varphi_L)" : "");
        throw NoFixedPointError(os.str(), below);
    }

    FixedPointResult out;
    for (double v : roots) out.candidates.push_back({phi_L_at_precision(spectrum, snr, 1.0 / v), v});
    std::sort(out.candidates.begin(), out.candidates.end(),
              [](const FixedPoint& a, const FixedPoint& b) { return a.rho_star < b.rho_star; });
    out.primary = out.candidates.front();
    return out;
}

std::vector<SeStep> se_trajectory(const SingularSpectrum& spectrum, double snr, const Constellation& c,
                                  int max_iters, double tol) {
    std::vector<SeStep> out;
    double v = 1.0;
    for (int t = 1; t <= max_iters; ++t) {
        const double rho = phi_L_at_precision(spectrum, snr, 1.0 / v);
        const double next = nld_variance(omega_S(c, rho), rho);
        out.push_back({t, rho, next});
        const bool done = std::abs(next - v) <= tol || next <= 0.0;
        v = next;
        if (done) break;
    }
    return out;
}

bool tunnel_open(const SingularSpectrum& spectrum, double snr, const NldCurve& nld, const ThresholdOptions& opt) {
    const double rho1 = phi_L(spectrum, snr, 1.0);
    // Below the LD range the NLD is unconstrained; the curve only has to be decoded eventually.
    if (nld(rho1) <= opt.decoded_floor) return true;
    const std::size_t n = std::max<std::size_t>(opt.ld_points, 2);
    const double l0 = std::log(1e-15);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::exp(l0 * static_cast<double>(i) / static_cast<double>(n - 1));
        const double t = 1.0 / v;
        const double rho = phi_L_at_precision(spectrum, snr, t);
        const double ld = omega_L(spectrum, snr, t);
        const double value = nld(rho);
        if (value <= opt.decoded_floor) return true;
        if (value > ld - opt.eps_gap) return false;
    }
    return false;
}

double se_threshold(const SingularSpectrum& spectrum, double snr_lo, double snr_hi, const NldCurve& nld,
                    const ThresholdOptions& opt) {
    if (!(snr_lo > 0.0 && snr_hi >= snr_lo))
        throw Error(ErrorCode::invalid_argument, "se_threshold: need 0 < snr_lo <= snr_hi");
    if (tunnel_open(spectrum, snr_lo, nld, opt)) return snr_lo;
    if (!tunnel_open(spectrum, snr_hi, nld, opt)) return kInf;
    double lo = linear_to_db(snr_lo);
    double hi = linear_to_db(snr_hi);
    while (hi - lo > opt.tol_db) {
        const double mid = 0.5 * (lo + hi);
        (tunnel_open(spectrum, db_to_linear(mid), nld, opt) ? hi : lo) = mid;
    }
    return db_to_linear(hi);
}

std::vector<double> default_rho_grid(double snr, std::size_t points) {
    std::vector<double> grid{0.0};
    const double a = std::log(1e-4 * snr);
    const double b = std::log(snr);
    for (std::size_t i = 0; i < points; ++i) {
        if (i + 1 == points) {
            grid.push_back(snr);
            break;
        }
        grid.push_back(i == 0 ? 1e-4 * snr : std::exp(a + (b - a) * static_cast<double>(i) / (points - 1)));
    }
    return grid;
}

TransferChart build_chart(const SingularSpectrum& spectrum, double snr, const Constellation& c,
                          std::string spectrum_id, std::size_t points) {
    TransferChart chart;
    chart.snr = snr;
    chart.spectrum_id = std::move(spectrum_id);
    chart.constellation = c.name();
    chart.rho_grid = default_rho_grid(snr, points);
    for (double rho : chart.rho_grid) {
        const double ld = varphi_L_or_inf(spectrum, snr, rho);
        const double s = omega_S(c, rho);
        chart.ld_curve.push_back(std::min(ld, 1.0));
        chart.nld_curve.push_back(s);
        chart.opt_curve.push_back(rho >= snr ? 0.0 : std::min(s, ld));
    }
    return chart;
}

} // namespace gmumimo
