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
#include <numbers>

#include "gmumimo/constellation.hpp"
#include "gmumimo/error.hpp"
#include "gmumimo/random.hpp"

using namespace gmumimo;

namespace {

// 1 - E tanh(rho + sqrt(rho) Z) by trapezoid over [-12, 12].
double qpsk_mmse_oracle(double rho) {
    const int steps = 20000;
    const double h = 24.0 / steps;
    double acc = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double z = -12.0 + i * h;
        const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
        acc += w * std::tanh(rho + std::sqrt(rho) * z) * std::exp(-0.5 * z * z);
    }
    return 1.0 - acc * h / std::sqrt(2.0 * std::numbers::pi);
}

// Per-axis MMSE of an equiprobable PAM by trapezoid, error written as sum_j w_j (a_k - a_j) / sum_j w_j.
double pam_axis_oracle(const std::vector<double>& levels, double rho) {
    const double sq = std::sqrt(rho);
    const std::size_t q = levels.size();
    double total = 0.0;
    for (std::size_t k = 0; k < q; ++k) {
        const double h = 1e-3;
        double acc = 0.0;
        for (double u = -60.0; u <= 60.0; u += h) {
            const double y = sq * levels[k] + u;
            double mx = -1e300;
            std::vector<double> w(q);
            for (std::size_t j = 0; j < q; ++j) {
                const double d = y - sq * levels[j];
                w[j] = -d * d;
                mx = std::max(mx, w[j]);
            }
            double num = 0.0, den = 0.0;
            for (std::size_t j = 0; j < q; ++j) {
                const double e = std::exp(w[j] - mx);
                num += e * (levels[k] - levels[j]);
                den += e;
            }
            acc += std::exp(-u * u) * (num / den) * (num / den) * h;
        }
        total += acc / std::sqrt(std::numbers::pi) / static_cast<double>(q);
    }
    return total;
}

Posterior enumerate(const Constellation& c, cplx r, double rho) {
    double z = 0.0;
    cplx mean = 0.0;
    double second = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double w = c.probs()[i] * std::exp(-rho * std::norm(r - c.symbols()[i]));
        z += w;
        mean += w * c.symbols()[i];
        second += w * std::norm(c.symbols()[i]);
    }
    mean /= z;
    return {mean, second / z - std::norm(mean)};
}

} // namespace

TEST_CASE("constellations have unit energy and consistent labels") {
    for (const auto& c : {Constellation::bpsk(), Constellation::qpsk(), Constellation::qam16()}) {
        double e = 0.0, p = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            e += c.probs()[i] * std::norm(c.symbols()[i]);
            p += c.probs()[i];
            CHECK(c.index_of_label(c.labels()[i]) == i);
        }
        CHECK(e == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(p == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(Constellation::by_name("16qam").size() == 16);
    CHECK_THROWS_AS(Constellation::by_name("8psk"), Error);
    CHECK_THROWS_AS(Constellation("bad", {cplx(2, 0)}, {1.0}, {0u}, 0), Error);
}

TEST_CASE("omega_S oracles") {
    const auto q = Constellation::qpsk();
    CHECK(omega_S(q, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (double rho : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0})
        CHECK(omega_S(q, rho) == doctest::Approx(qpsk_mmse_oracle(rho)).epsilon(1e-9));
    for (double rho : {0.0, 0.5, 3.0, 30.0}) CHECK(omega_S(Constellation::gaussian(), rho) == 1.0 / (1.0 + rho));
    for (const auto& c : {Constellation::bpsk(), Constellation::qpsk(), Constellation::qam16()})
        for (double rho : {0.3, 1.0, 4.0})  // Gauss-Hermite degrades as the posterior sharpens; loose check only
            CHECK(omega_S(c, rho) == doctest::Approx(omega_S_gauss_hermite(c, rho, 96)).epsilon(1e-3));
}

TEST_CASE("omega_S keeps relative accuracy at high rho") {
    const double a = 1.0 / std::sqrt(2.0), d = 1.0 / std::sqrt(10.0);
    for (double rho : {12.0, 100.0, 238.0, 400.0}) {
        CHECK(omega_S(Constellation::qpsk(), rho) == doctest::Approx(2.0 * pam_axis_oracle({a, -a}, rho)).epsilon(1e-8));
        CHECK(omega_S(Constellation::qam16(), rho) ==
              doctest::Approx(2.0 * pam_axis_oracle({3 * d, d, -d, -3 * d}, rho)).epsilon(1e-8));
    }
}

TEST_CASE("omega_S matches Monte Carlo at rho = 1") {
    const auto q = Constellation::qpsk();
    Rng rng(11);
    const int n = 400000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const cplx x = q.symbols()[rng.index(4)];
        const cplx r = x + rng.complex_gaussian(1.0);
        const double e = std::norm(posterior_mean_var(q, r, 1.0).mean - x);
        sum += e;
        sum2 += e * e;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    CHECK(std::abs(mean - omega_S(q, 1.0)) < 3.0 * se);
}

TEST_CASE("omega_S is nonincreasing and vanishes") {
    for (const auto& c : {Constellation::qpsk(), Constellation::qam16()}) {
        double prev = 1.0 + 1e-12;
        for (double rho = 1e-3; rho < 1e3; rho *= 1.3) {
            const double v = omega_S(c, rho);
            CHECK(v <= prev + 1e-12);
            prev = v;
        }
        CHECK(omega_S(c, 1e4) < 1e-10);
    }
}

TEST_CASE("posterior equals Bayes enumeration") {
    const auto q = Constellation::qpsk();
    const auto p = posterior_mean_var(q, cplx(0.3, 0.1), 2.0);
    const auto e = enumerate(q, cplx(0.3, 0.1), 2.0);
    CHECK(std::abs(p.mean - e.mean) < 1e-12);
    CHECK(std::abs(p.var - e.var) < 1e-12);

    const auto b = posterior_mean_var(Constellation::bpsk(), cplx(0.0, 0.0), 3.0);
    CHECK(std::abs(b.mean) < 1e-15);
    CHECK(b.var == doctest::Approx(1.0).epsilon(1e-14));

    const auto sharp = posterior_mean_var(q, q.symbols()[2], 1e8);
    CHECK(std::abs(sharp.mean - q.symbols()[2]) < 1e-12);
    CHECK(sharp.var < 1e-12);

    // Uniform bit priors change nothing; strong priors pin the symbol.
    const std::vector<double> none{0.0, 0.0};
    CHECK(std::abs(posterior_mean_var(q, cplx(0.3, 0.1), 2.0, none).mean - p.mean) < 1e-14);
    const std::vector<double> strong{-40.0, 40.0};  // bits 1, 0
    CHECK(std::abs(posterior_mean_var(q, cplx(0.3, 0.1), 2.0, strong).mean -
                   q.symbols()[q.index_of_label(0b10u)]) < 1e-12);
}

TEST_CASE("modulation, LLRs and hard decisions") {
    const auto q = Constellation::qpsk();
    const Bits zero{0, 0};
    const double a = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(modulate(q, zero)[0] - cplx(a, a)) < 1e-15);

    Rng rng(5);
    for (const auto& c : {Constellation::qpsk(), Constellation::qam16()}) {
        Bits bits(400);
        for (auto& b : bits) b = rng.bit();
        const auto sym = modulate(c, bits);
        CHECK(hard_demodulate(c, sym) == bits);
        const auto llr = demodulate_llr(c, sym, 1e6);
        for (std::size_t i = 0; i < bits.size(); ++i) {
            CHECK((llr[i] > 0.0) == (bits[i] == 0));
            CHECK(std::abs(llr[i]) <= kLlrClip);
        }
    }
    const std::vector<cplx> one{cplx(a, a)};
    const auto llr = demodulate_llr(q, one, 100.0);
    CHECK(llr[0] > 20.0);
    CHECK(llr[1] > 20.0);

    // Exact LLR of the first QPSK bit: 4 a rho Re(r) for Gray mapping.
    const std::vector<cplx> r{cplx(0.2, -0.7)};
    const auto l = demodulate_llr(q, r, 1.5);
    CHECK(l[0] == doctest::Approx(4.0 * a * 1.5 * 0.2).epsilon(1e-12));
    CHECK(l[1] == doctest::Approx(4.0 * a * 1.5 * -0.7).epsilon(1e-12));

    const Bits odd{0, 1, 1};
    CHECK_THROWS_AS(modulate(q, odd), Error);
}
