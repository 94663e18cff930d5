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

#include "gmumimo/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gmumimo/error.hpp"
#include "gmumimo/quadrature.hpp"

namespace gmumimo {

namespace {

double log_sum_exp(std::span<const double> x) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : x) mx = std::max(mx, v);
    if (!std::isfinite(mx)) return mx;
    double acc = 0.0;
    for (double v : x) acc += std::exp(v - mx);
    return mx + std::log(acc);
}

PamAxis uniform_axis(std::vector<double> levels) {
    PamAxis a;
    a.probs.assign(levels.size(), 1.0 / static_cast<double>(levels.size()));
    a.levels = std::move(levels);
    return a;
}

} // namespace

Constellation::Constellation(std::string name, std::vector<cplx> symbols, std::vector<double> probs,
                             std::vector<std::uint32_t> labels, int bits_per_symbol)
    : name_(std::move(name)), symbols_(std::move(symbols)), probs_(std::move(probs)),
      labels_(std::move(labels)), bits_per_symbol_(bits_per_symbol) {
    finish();
}

void Constellation::finish() {
    if (gaussian_) return;
    const std::size_t q = symbols_.size();
    if (bits_per_symbol_ < 1 || bits_per_symbol_ > 16 || q != (std::size_t{1} << bits_per_symbol_))
        throw Error(ErrorCode::invalid_argument, "constellation: size must be 2^bits_per_symbol");
    if (probs_.size() != q || labels_.size() != q)
        throw Error(ErrorCode::invalid_argument, "constellation: probs/labels size mismatch");
    double psum = 0.0;
    double energy = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
        if (!(probs_[i] > 0.0)) throw Error(ErrorCode::invalid_argument, "constellation: probabilities must be > 0");
        psum += probs_[i];
        energy += probs_[i] * std::norm(symbols_[i]);
    }
    if (std::abs(psum - 1.0) > 1e-12) throw Error(ErrorCode::invalid_argument, "constellation: probabilities must sum to 1");
    if (std::abs(energy - 1.0) > 1e-12) throw Error(ErrorCode::invalid_argument, "constellation: average energy must be 1");
    by_label_.assign(q, q);
    for (std::size_t i = 0; i < q; ++i) {
        if (labels_[i] >= q || by_label_[labels_[i]] != q)
            throw Error(ErrorCode::invalid_argument, "constellation: labeling is not a bijection");
        by_label_[labels_[i]] = i;
    }
    log_probs_.resize(q);
    for (std::size_t i = 0; i < q; ++i) log_probs_[i] = std::log(probs_[i]);
}

Constellation Constellation::bpsk() {
    Constellation c("bpsk", {cplx(1.0, 0.0), cplx(-1.0, 0.0)}, {0.5, 0.5}, {0u, 1u}, 1);
    c.axes_ = std::make_pair(uniform_axis({1.0, -1.0}), uniform_axis({0.0}));
    return c;
}

Constellation Constellation::qpsk() {
    // Gray: first bit sets the I sign, second the Q sign; 0 -> positive.
    const double a = 1.0 / std::numbers::sqrt2;
    Constellation c("qpsk", {cplx(a, a), cplx(a, -a), cplx(-a, a), cplx(-a, -a)},
                    {0.25, 0.25, 0.25, 0.25}, {0b00u, 0b01u, 0b10u, 0b11u}, 2);
    c.axes_ = std::make_pair(uniform_axis({a, -a}), uniform_axis({a, -a}));
    return c;
}

Constellation Constellation::qam16() {
    // Per-axis Gray PAM4: 00 -> +3, 01 -> +1, 11 -> -1, 10 -> -3 (scaled by 1/sqrt(10)).
    const double d = 1.0 / std::sqrt(10.0);
    const std::uint32_t pam_labels[4] = {0b00u, 0b01u, 0b11u, 0b10u};
    const double pam_levels[4] = {3 * d, d, -d, -3 * d};
    std::vector<cplx> symbols;
    std::vector<std::uint32_t> labels;
    for (int i = 0; i < 4; ++i)
        for (int q = 0; q < 4; ++q) {
            symbols.emplace_back(pam_levels[i], pam_levels[q]);
            labels.push_back((pam_labels[i] << 2) | pam_labels[q]);
        }
    Constellation c("16qam", std::move(symbols), std::vector<double>(16, 1.0 / 16.0), std::move(labels), 4);
    std::vector<double> lv(pam_levels, pam_levels + 4);
    c.axes_ = std::make_pair(uniform_axis(lv), uniform_axis(lv));
    return c;
}

Constellation Constellation::gaussian() {
    Constellation c;
    c.name_ = "gaussian";
    c.gaussian_ = true;
    return c;
}

Constellation Constellation::by_name(const std::string& name) {
    if (name == "qpsk") return qpsk();
    if (name == "16qam") return qam16();
    if (name == "bpsk") return bpsk();
    if (name == "gaussian") return gaussian();
    throw Error(ErrorCode::config, "unknown constellation '" + name + "' (expected qpsk|16qam|bpsk|gaussian)");
}

namespace {

// MMSE of one real axis observed as sqrt(rho) a + u, u ~ N(0, 1/2).
double axis_mmse(const PamAxis& ax, double rho) {
    const std::size_t q = ax.levels.size();
    double mean = 0.0;
    double energy = 0.0;
    for (std::size_t k = 0; k < q; ++k) {
        mean += ax.probs[k] * ax.levels[k];
        energy += ax.probs[k] * ax.levels[k] * ax.levels[k];
    }
    if (q == 1) return 0.0;
    if (rho <= 0.0) return energy - mean * mean;

    const double sq = std::sqrt(rho);
    std::vector<double> logp(q);
    for (std::size_t j = 0; j < q; ++j) logp[j] = std::log(ax.probs[j]);
    std::vector<double> sorted = ax.levels;
    std::sort(sorted.begin(), sorted.end());

    std::vector<double> w(q);
    // a_k - E[a | y], summed as a weighted difference so it keeps full relative
    // precision when the posterior is nearly a point mass on a_k.
    auto error_given = [&](std::size_t k, double y) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < q; ++j) {
            const double d = y - sq * ax.levels[j];
            w[j] = logp[j] - d * d;
            mx = std::max(mx, w[j]);
        }
        double num = 0.0;
        double den = 0.0;
        for (std::size_t j = 0; j < q; ++j) {
            const double e = std::exp(w[j] - mx);
            num += e * (ax.levels[k] - ax.levels[j]);
            den += e;
        }
        return num / den;
    };

    // A mirror-symmetric axis contributes equally from a and -a; integrate a >= 0 only.
    bool mirrored = std::abs(mean) < 1e-15;
    for (std::size_t k = 0; k < q && mirrored; ++k) {
        bool found = false;
        for (std::size_t j = 0; j < q; ++j)
            found = found || (ax.levels[j] == -ax.levels[k] && ax.probs[j] == ax.probs[k]);
        mirrored = found;
    }

    // The Gaussian factor e^{-u^2} is negligible beyond 10 from the nearest
    // decision boundary, so the window reaches 10 past the outermost one.
    const double norm = 1.0 / std::sqrt(std::numbers::pi);
    auto integrate_all = [&](double tol) {
        double total = 0.0;
        for (std::size_t k = 0; k < q; ++k) {
            const double ak = ax.levels[k];
            if (mirrored && ak < 0.0) continue;
            const double weight = mirrored && ak > 0.0 ? 2.0 * ax.probs[k] : ax.probs[k];
            std::vector<double> bps;
            double reach = 0.0;
            for (std::size_t j = 0; j + 1 < q; ++j) {
                bps.push_back(sq * 0.5 * (sorted[j] + sorted[j + 1]) - sq * ak);
                reach = std::max(reach, std::abs(bps.back()));
            }
            const double span = reach + 10.0;
            auto f = [&](double u) {
                const double e = error_given(k, sq * ak + u);
                return norm * std::exp(-u * u) * e * e;
            };
            total += weight * integrate(f, -span, span, tol, bps).value;
        }
        return total;
    };
    double total = integrate_all(1e-15);
    if (total < 1e-10) total = integrate_all(std::max(total * 1e-9, 1e-300));
    return total;
}

struct HermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;  // normalized: sum = 1 for weight e^{-x^2}/sqrt(pi)
};

HermiteRule hermite_rule(int order) {
    // Golub–Welsch on the Jacobi matrix of the physicists' Hermite polynomials.
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
    Eigen::VectorXd sub(std::max(order - 1, 0));
    for (int k = 1; k < order; ++k) sub(k - 1) = std::sqrt(0.5 * k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    HermiteRule rule;
    for (int i = 0; i < order; ++i) {
        rule.nodes.push_back(es.eigenvalues()(i));
        const double v0 = es.eigenvectors()(0, i);
        rule.weights.push_back(v0 * v0);
    }
    return rule;
}

} // namespace

double omega_S(const Constellation& c, double rho) {
    if (!(rho >= 0.0)) throw Error(ErrorCode::invalid_argument, "omega_S: rho must be >= 0");
    if (c.is_gaussian()) return 1.0 / (1.0 + rho);
    if (c.axes()) {
        const auto& [in_phase, quadrature] = *c.axes();
        const double i_part = axis_mmse(in_phase, rho);
        const bool same = in_phase.levels == quadrature.levels && in_phase.probs == quadrature.probs;
        return std::clamp(i_part + (same ? i_part : axis_mmse(quadrature, rho)), 0.0, 1.0);
    }
    return omega_S_gauss_hermite(c, rho, 64);
}

double omega_S_gauss_hermite(const Constellation& c, double rho, int order) {
    if (order < 1) throw Error(ErrorCode::invalid_argument, "omega_S_gauss_hermite: order must be >= 1");
    if (c.is_gaussian()) return 1.0 / (1.0 + rho);
    const auto rule = hermite_rule(order);
    const double sq = std::sqrt(rho);
    const std::size_t q = c.size();
    std::vector<double> w(q);
    double total = 0.0;
    for (std::size_t k = 0; k < q; ++k) {
        const cplx sk = c.symbols()[k];
        double acc = 0.0;
        for (int a = 0; a < order; ++a)
            for (int b = 0; b < order; ++b) {
                const cplx y = sq * sk + cplx(rule.nodes[a], rule.nodes[b]);
                double mx = -std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < q; ++j) {
                    w[j] = c.log_probs()[j] - std::norm(y - sq * c.symbols()[j]);
                    mx = std::max(mx, w[j]);
                }
                cplx num = 0.0;
                double den = 0.0;
                for (std::size_t j = 0; j < q; ++j) {
                    const double e = std::exp(w[j] - mx);
                    num += e * c.symbols()[j];
                    den += e;
                }
                acc += rule.weights[a] * rule.weights[b] * std::norm(sk - num / den);
            }
        total += c.probs()[k] * acc;
    }
    return total;
}

Posterior posterior_mean_var(const Constellation& c, cplx r, double rho) {
    return posterior_mean_var(c, r, rho, {});
}

Posterior posterior_mean_var(const Constellation& c, cplx r, double rho,
                             std::span<const double> bit_prior_llrs) {
    if (c.is_gaussian()) {
        if (rho <= 0.0) return {cplx(0.0, 0.0), 1.0};
        return {r * (rho / (1.0 + rho)), 1.0 / (1.0 + rho)};
    }
    const std::size_t q = c.size();
    const int bps = c.bits_per_symbol();
    if (!bit_prior_llrs.empty() && bit_prior_llrs.size() != static_cast<std::size_t>(bps))
        throw Error(ErrorCode::framing, "posterior_mean_var: need one prior LLR per bit");
    const double prec = std::max(rho, 0.0);
    double stack_buf[64];
    std::vector<double> heap;
    double* w = stack_buf;
    if (q > 64) {
        heap.resize(q);
        w = heap.data();
    }
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < q; ++i) {
        double lw = c.log_probs()[i] - prec * std::norm(r - c.symbols()[i]);
        for (std::size_t j = 0; j < bit_prior_llrs.size(); ++j)
            lw += (c.bit(i, static_cast<int>(j)) == 0 ? 0.5 : -0.5) * bit_prior_llrs[j];
        w[i] = lw;
        mx = std::max(mx, lw);
    }
    if (!std::isfinite(mx)) throw Error(ErrorCode::numerical, "posterior_mean_var: non-finite likelihood");
    double den = 0.0;
    cplx mean = 0.0;
    double second = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
        const double e = std::exp(w[i] - mx);
        den += e;
        mean += e * c.symbols()[i];
        second += e * std::norm(c.symbols()[i]);
    }
    mean /= den;
    second /= den;
    return {mean, std::max(0.0, second - std::norm(mean))};
}

std::vector<cplx> modulate(const Constellation& c, std::span<const std::uint8_t> bits) {
    if (c.is_gaussian()) throw Error(ErrorCode::invalid_argument, "modulate: gaussian prior has no labeling");
    const auto bps = static_cast<std::size_t>(c.bits_per_symbol());
    if (bits.size() % bps != 0)
        throw Error(ErrorCode::framing, "modulate: bit count not divisible by bits_per_symbol");
    std::vector<cplx> out(bits.size() / bps);
    for (std::size_t s = 0; s < out.size(); ++s) {
        std::uint32_t label = 0;
        for (std::size_t j = 0; j < bps; ++j) label = (label << 1) | (bits[s * bps + j] & 1u);
        out[s] = c.symbols()[c.index_of_label(label)];
    }
    return out;
}

std::vector<double> demodulate_llr(const Constellation& c, std::span<const cplx> r, double rho) {
    if (c.is_gaussian()) throw Error(ErrorCode::invalid_argument, "demodulate_llr: gaussian prior has no labeling");
    const std::size_t q = c.size();
    const int bps = c.bits_per_symbol();
    std::vector<double> out(r.size() * static_cast<std::size_t>(bps));
    std::vector<double> metric(q);
    std::vector<double> zero;
    std::vector<double> one;
    zero.reserve(q);
    one.reserve(q);
    for (std::size_t s = 0; s < r.size(); ++s) {
        for (std::size_t i = 0; i < q; ++i) metric[i] = c.log_probs()[i] - rho * std::norm(r[s] - c.symbols()[i]);
        for (int j = 0; j < bps; ++j) {
            zero.clear();
            one.clear();
            for (std::size_t i = 0; i < q; ++i) (c.bit(i, j) == 0 ? zero : one).push_back(metric[i]);
            const double llr = log_sum_exp(zero) - log_sum_exp(one);
            out[s * static_cast<std::size_t>(bps) + static_cast<std::size_t>(j)] =
                std::isnan(llr) ? 0.0 : std::clamp(llr, -kLlrClip, kLlrClip);
        }
    }
    return out;
}

std::size_t nearest_symbol(const Constellation& c, cplx r) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double d = std::norm(r - c.symbols()[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

Bits hard_demodulate(const Constellation& c, std::span<const cplx> r) {
    if (c.is_gaussian()) throw Error(ErrorCode::invalid_argument, "hard_demodulate: gaussian prior has no labeling");
    const int bps = c.bits_per_symbol();
    Bits out;
    out.reserve(r.size() * static_cast<std::size_t>(bps));
    for (cplx v : r) {
        const auto i = nearest_symbol(c, v);
        for (int j = 0; j < bps; ++j) out.push_back(c.bit(i, j));
    }
    return out;
}

} // namespace gmumimo
