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
#include <sstream>

#include "gmumimo/detector.hpp"
#include "gmumimo/error.hpp"
#include "gmumimo/random.hpp"
#include "gmumimo/state_evolution.hpp"

using namespace gmumimo;

namespace {

CMatrix random_symbols(const Constellation& c, std::size_t n, std::size_t l, Rng& rng) {
    CMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(l));
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = c.symbols()[rng.index(c.size())];
    return x;
}

CMatrix receive(const ChannelMatrix& ch, const CMatrix& x, double snr, Rng& rng) {
    CMatrix y = ch.apply(x);
    for (Eigen::Index j = 0; j < y.cols(); ++j)
        for (Eigen::Index i = 0; i < y.rows(); ++i) y(i, j) += rng.complex_gaussian(1.0 / snr);
    return y;
}

double corr(const CMatrix& a, const CMatrix& b) {
    return std::abs((a.array() * b.array().conjugate()).sum()) / (a.norm() * b.norm());
}

} // namespace

TEST_CASE("LD on the identity channel") {
    const auto s = make_conditioned_spectrum(4, 4, 1.0);
    const ChannelMatrix ch(CMatrix::Identity(4, 4), CMatrix::Identity(4, 4), s);
    CMatrix y = CMatrix::Random(4, 1);
    const double snr = 3.0;
    const auto out = ld_step(CMatrix::Zero(4, 1), 1.0, ch, y, snr);
    // f = snr y / (snr + 1), Omega_L = 1/(snr + 1), c_L = (snr + 1)/snr, so r = y.
    CHECK((out.r - y).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(out.rho == doctest::Approx(snr).epsilon(1e-12));
}

TEST_CASE("LD matches the dense formula") {
    Rng rng(2);
    for (int t = 0; t < 50; ++t) {
        const std::size_t m = 2 + rng.index(3), n = 2 + rng.index(3);
        const auto spec = make_iid_gaussian_spectrum(m, n, 100 + t);
        const ChannelMatrix ch(haar_unitary(m, rng), haar_unitary(n, rng), spec);
        const CMatrix a = ch.dense();
        const double snr = 0.5 + 5.0 * rng.uniform();
        const double v = 0.05 + 0.9 * rng.uniform();
        CMatrix y = CMatrix::Random(static_cast<Eigen::Index>(m), 2);
        CMatrix sv = CMatrix::Random(static_cast<Eigen::Index>(n), 2);
        const CMatrix w = snr * a.adjoint() * a + CMatrix::Identity(n, n) / v;
        const CMatrix winv = w.inverse();
        const CMatrix f = winv * (snr * a.adjoint() * y + sv / v);
        const double omega = winv.trace().real() / static_cast<double>(n);
        const double c_l = v / (v - omega);
        const CMatrix r = c_l * f + (1.0 - c_l) * sv;
        const auto out = ld_step(sv, v, ch, y, snr);
        CHECK((out.r - r).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(out.rho == doctest::Approx(1.0 / omega - 1.0 / v).epsilon(1e-10));
    }
}

TEST_CASE("uncoded NLD") {
    const auto q = Constellation::qpsk();
    CMatrix r(2, 1);
    r << cplx(0.3, 0.1), cplx(-1.2, 0.4);
    const double rho = 2.0;
    const auto out = nld_uncoded_step(r, rho, q);
    const double omega = omega_S(q, rho);
    const double c_c = 1.0 / (1.0 - rho * omega);
    for (Eigen::Index i = 0; i < 2; ++i) {
        const cplx eta = posterior_mean_var(q, r(i, 0), rho).mean;
        CHECK(std::abs(out.posterior_mean(i, 0) - eta) < 1e-12);
        CHECK(std::abs(out.s(i, 0) - (c_c * eta + (1.0 - c_c) * r(i, 0))) < 1e-12);
    }
    CHECK(out.v_s == doctest::Approx(omega / (1.0 - rho * omega)).epsilon(1e-12));

    // Gaussian prior: the orthogonalized estimate carries no information.
    const auto g = nld_uncoded_step(r, rho, Constellation::gaussian());
    CHECK(g.s.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(g.v_s == doctest::Approx(1.0).epsilon(1e-12));

    // High precision on exact symbols.
    CMatrix exact(1, 1);
    exact << q.symbols()[1];
    const auto sharp = nld_uncoded_step(exact, 1e7, q);
    CHECK(std::abs(sharp.posterior_mean(0, 0) - q.symbols()[1]) < 1e-9);
    CHECK(sharp.v_s < 1e-6);
}

TEST_CASE("coded NLD with passthrough codes equals the uncoded NLD") {
    const auto q = Constellation::qpsk();
    const UserLayout layout{4, 3, 2, 5};
    const auto code = LdpcCode::passthrough(30);
    const std::vector<const LdpcCode*> codes{&code, &code};
    Rng rng(4);
    CMatrix r(12, 5);
    for (Eigen::Index j = 0; j < 5; ++j)
        for (Eigen::Index i = 0; i < 12; ++i) r(i, j) = rng.complex_gaussian();
    const auto a = nld_coded_step(r, 1.3, q, layout, codes, 5);
    const auto b = nld_uncoded_step(r, 1.3, q);
    CHECK((a.s - b.s).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(a.v_s == doctest::Approx(b.v_s).epsilon(1e-12));
}

TEST_CASE("uncoded detection at very high snr") {
    const auto q = Constellation::qpsk();
    const ChannelSpec spec{96, 64, SpectrumKind::conditioned, 4.0, 3, LeftUnitary::haar};
    const auto ch = spec.realize(0);
    Rng rng(6);
    const CMatrix x = random_symbols(q, 64, 2, rng);
    const double snr = db_to_linear(60.0);
    const CMatrix y = receive(ch, x, snr, rng);
    const UserLayout layout{1, 64, 1, 2};
    const auto res = run_detector(y, ch, snr, q, layout, {}, DetectorOptions{}, &x);
    CHECK(res.iterations <= 3);
    CHECK((res.x_hat - x).cwiseAbs().maxCoeff() < 1e-6);
    std::ostringstream os;
    res.trajectory.write_csv(os);
    CHECK(os.str().rfind("iter,rho,v,mse_r,mse_s\n", 0) == 0);
}

TEST_CASE("genie trajectory tracks SE and errors stay orthogonal") {
    const auto q = Constellation::qpsk();
    const ChannelSpec spec{683, 1024, SpectrumKind::iid, 1.0, 9, LeftUnitary::identity};
    const auto ch = spec.realize(0);
    const double snr = db_to_linear(6.0);
    Rng rng(10);
    const CMatrix x = random_symbols(q, 1024, 1, rng);
    const CMatrix y = receive(ch, x, snr, rng);

    DetectorOptions opt;
    opt.max_iters = 8;
    opt.tol = -1.0;
    const UserLayout layout{1, 1024, 1, 1};
    const auto res = run_detector(y, ch, snr, q, layout, {}, opt, &x);
    const auto se = se_trajectory(ch.spectrum(), snr, q, 8);
    REQUIRE(res.trajectory.records.size() == 8);
    for (std::size_t t = 0; t < 8; ++t) {
        const auto& rec = res.trajectory.records[t];
        CHECK(rec.mse_r * rec.rho == doctest::Approx(1.0).epsilon(0.1));
        CHECK(rec.mse_s == doctest::Approx(se[t].v).epsilon(0.1));
    }

    // Orthogonality needs more samples than one column at this size.
    const ChannelSpec big{1365, 2048, SpectrumKind::iid, 1.0, 9, LeftUnitary::identity};
    const auto ch2 = big.realize(0);
    const CMatrix x2 = random_symbols(q, 2048, 4, rng);
    const CMatrix y2 = receive(ch2, x2, snr, rng);
    const LinearDetector ld(ch2, y2, snr);
    auto lo = ld.step(CMatrix::Zero(2048, 4), 1.0);
    for (int t = 0; t < 4; ++t) {
        const auto nl = nld_uncoded_step(lo.r, lo.rho, q);
        CHECK(corr(lo.r - x2, nl.s - x2) <= 0.05);
        const auto next = ld.step(nl.s, nl.v_s);
        CHECK(corr(nl.s - x2, next.r - x2) <= 0.05);
        lo = next;
    }
}

TEST_CASE("residual variance estimate follows the true error") {
    const auto q = Constellation::qpsk();
    const ChannelSpec spec{128, 192, SpectrumKind::conditioned, 50.0, 2, LeftUnitary::haar};
    const auto ch = spec.realize(1);
    const double snr = db_to_linear(8.0);
    Rng rng(13);
    const CMatrix x = random_symbols(q, 192, 16, rng);
    const CMatrix y = receive(ch, x, snr, rng);
    DetectorOptions opt;
    opt.variance = VarianceEstimate::residual;
    opt.max_iters = 10;
    const UserLayout layout{1, 192, 1, 16};
    const auto res = run_detector(y, ch, snr, q, layout, {}, opt, &x);
    for (const auto& rec : res.trajectory.records) CHECK(rec.v == doctest::Approx(rec.mse_s).epsilon(0.15));
}

TEST_CASE("detector argument checks") {
    const auto q = Constellation::qpsk();
    const ChannelSpec spec{8, 8, SpectrumKind::conditioned, 2.0, 2, LeftUnitary::haar};
    const auto ch = spec.realize(0);
    const CMatrix y = CMatrix::Zero(8, 1);
    DetectorOptions opt;
    opt.damping = 0.0;
    CHECK_THROWS_AS(run_detector(y, ch, 1.0, q, UserLayout{1, 8, 1, 1}, {}, opt), Error);
    CHECK_THROWS_AS(run_detector(y, ch, 1.0, q, UserLayout{1, 6, 1, 1}, {}, DetectorOptions{}), Error);
}
