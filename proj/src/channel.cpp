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

#include "gmumimo/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/random/gamma_distribution.hpp>

#include "gmumimo/error.hpp"

namespace gmumimo {

std::vector<double> SingularSpectrum::eigenvalues() const {
    std::vector<double> lam(n, 0.0);
    for (std::size_t i = 0; i < sigmas.size(); ++i) lam[i] = sigmas[i] * sigmas[i];
    return lam;
}

bool SingularSpectrum::is_flat(double rel_tol) const {
    if (zero_modes() != 0 || sigmas.empty()) return false;
    return (sigmas.front() - sigmas.back()) <= rel_tol * sigmas.front();
}

void SingularSpectrum::validate() const {
    if (m == 0 || n == 0) throw Error(ErrorCode::invalid_dimension, "spectrum: zero dimension");
    if (sigmas.size() != std::min(m, n))
        throw Error(ErrorCode::invalid_dimension, "spectrum: expected min(m, n) singular values");
    double energy = 0.0;
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        if (!(sigmas[i] >= 0.0)) throw Error(ErrorCode::invalid_argument, "spectrum: negative sigma");
        if (i > 0 && sigmas[i] > sigmas[i - 1])
            throw Error(ErrorCode::invalid_argument, "spectrum: sigmas must be nonincreasing");
        energy += sigmas[i] * sigmas[i];
    }
    if (std::abs(energy / static_cast<double>(n) - 1.0) > 1e-12)
        throw Error(ErrorCode::invalid_argument, "spectrum: tr{A^H A}/N != 1");
}

namespace {

constexpr std::size_t kDenseLimit = 512;

void normalize(SingularSpectrum& s) {
    double energy = 0.0;
    for (double x : s.sigmas) energy += x * x;
    const double scale = std::sqrt(static_cast<double>(s.n) / energy);
    for (double& x : s.sigmas) x *= scale;
}

void check_dims(std::size_t m, std::size_t n) {
    if (m == 0 || n == 0) throw Error(ErrorCode::invalid_dimension, "channel dimensions must be positive");
}

} // namespace

SingularSpectrum make_conditioned_spectrum(std::size_t m, std::size_t n, double kappa) {
    check_dims(m, n);
    if (!(kappa >= 1.0) || !std::isfinite(kappa))
        throw Error(ErrorCode::invalid_condition_number, "condition number must be >= 1");
    SingularSpectrum s;
    s.m = m;
    s.n = n;
    const std::size_t t = std::min(m, n);
    s.sigmas.resize(t);
    for (std::size_t i = 0; i < t; ++i) {
        const double frac = t == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(t - 1);
        s.sigmas[i] = std::pow(kappa, -frac);
    }
    normalize(s);
    return s;
}

SingularSpectrum make_iid_gaussian_spectrum(std::size_t m, std::size_t n, std::uint64_t seed) {
    check_dims(m, n);
    // Singular values of a p x q complex Gaussian matrix (p <= q) have the law of
    // those of a lower-bidiagonal matrix with diagonal chi_{2q}, chi_{2q-2}, ...
    // and subdiagonal chi_{2(p-1)}, ..., chi_2 (Laguerre beta = 2 ensemble).
    Rng rng(seed, {0x5350u});
    const std::size_t p = std::min(m, n);
    const std::size_t q = std::max(m, n);
    auto chi = [&](double dof) {
        boost::random::gamma_distribution<double> g(0.5 * dof, 2.0);
        return std::sqrt(g(rng.engine()));
    };
    std::vector<double> d(p);
    std::vector<double> e(p > 0 ? p - 1 : 0);
    for (std::size_t i = 0; i < p; ++i) d[i] = chi(2.0 * static_cast<double>(q - i));
    for (std::size_t i = 0; i + 1 < p; ++i) e[i] = chi(2.0 * static_cast<double>(p - 1 - i));
    // B B^T is tridiagonal: diag d_i^2 + e_{i-1}^2, offdiag d_i e_i.
    Eigen::VectorXd diag(static_cast<Eigen::Index>(p));
    Eigen::VectorXd off(static_cast<Eigen::Index>(p > 0 ? p - 1 : 0));
    for (std::size_t i = 0; i < p; ++i) diag(static_cast<Eigen::Index>(i)) = d[i] * d[i] + (i > 0 ? e[i - 1] * e[i - 1] : 0.0);
    for (std::size_t i = 0; i + 1 < p; ++i) off(static_cast<Eigen::Index>(i)) = d[i] * e[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    SingularSpectrum s;
    s.m = m;
    s.n = n;
    s.sigmas.resize(p);
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        s.sigmas[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, ev(ev.size() - 1 - i)));
    normalize(s);
    return s;
}

UnitaryOperator UnitaryOperator::identity(std::size_t dim) {
    if (dim == 0) throw Error(ErrorCode::invalid_dimension, "unitary: dim must be >= 1");
    UnitaryOperator q;
    q.kind_ = Kind::identity;
    q.dim_ = dim;
    return q;
}

UnitaryOperator UnitaryOperator::from_dense(CMatrix m) {
    if (m.rows() == 0 || m.rows() != m.cols()) throw Error(ErrorCode::invalid_dimension, "unitary: must be square");
    UnitaryOperator q;
    q.dim_ = static_cast<std::size_t>(m.rows());
    if (m.isIdentity(0.0)) {
        q.kind_ = Kind::identity;
        return q;
    }
    q.kind_ = Kind::dense;
    q.dense_ = std::move(m);
    return q;
}

UnitaryOperator UnitaryOperator::haar(std::size_t dim, Rng& rng) {
    if (dim == 0) throw Error(ErrorCode::invalid_dimension, "haar_unitary: dim must be >= 1");
    UnitaryOperator q;
    q.kind_ = Kind::householder;
    q.dim_ = dim;
    q.phases_.resize(static_cast<Eigen::Index>(dim));
    q.reflectors_.reserve(dim);
    // Column k of a Gaussian matrix, after the first k reflections, is again a
    // Gaussian vector on rows k.. independent of the past: draw it directly.
    for (std::size_t k = 0; k < dim; ++k) {
        const auto len = static_cast<Eigen::Index>(dim - k);
        CVector x(len);
        for (Eigen::Index i = 0; i < len; ++i) x(i) = rng.complex_gaussian();
        const double norm = x.norm();
        const double mag0 = std::abs(x(0));
        const cplx phase0 = mag0 > 0.0 ? x(0) / mag0 : cplx(1.0, 0.0);
        // H x = alpha e_1 with alpha = -phase0 |x|; R_kk = alpha.
        CVector u = x;
        u(0) += phase0 * norm;
        const double un = u.norm();
        if (un > 0.0) u /= un;
        q.reflectors_.push_back(std::move(u));
        q.phases_(static_cast<Eigen::Index>(k)) = -phase0;
    }
    return q;
}

CMatrix UnitaryOperator::apply(const CMatrix& x) const {
    if (static_cast<std::size_t>(x.rows()) != dim_) throw Error(ErrorCode::invalid_dimension, "unitary: row mismatch");
    switch (kind_) {
    case Kind::identity:
        return x;
    case Kind::dense:
        return dense_ * x;
    case Kind::householder:
        break;
    }
    // Q D X = H_0 (H_1 (... H_{d-1} (D X)))
    CMatrix out = phases_.asDiagonal() * x;
    for (std::size_t k = dim_; k-- > 0;) {
        const auto& u = reflectors_[k];
        auto blk = out.bottomRows(u.size());
        const Eigen::RowVectorXcd w = u.adjoint() * blk;
        blk.noalias() -= 2.0 * u * w;
    }
    return out;
}

CMatrix UnitaryOperator::apply_adjoint(const CMatrix& x) const {
    if (static_cast<std::size_t>(x.rows()) != dim_) throw Error(ErrorCode::invalid_dimension, "unitary: row mismatch");
    switch (kind_) {
    case Kind::identity:
        return x;
    case Kind::dense:
        return dense_.adjoint() * x;
    case Kind::householder:
        break;
    }
    // (Q D)^H X = D^H H_{d-1} ... H_0 X
    CMatrix out = x;
    for (std::size_t k = 0; k < dim_; ++k) {
        const auto& u = reflectors_[k];
        auto blk = out.bottomRows(u.size());
        const Eigen::RowVectorXcd w = u.adjoint() * blk;
        blk.noalias() -= 2.0 * u * w;
    }
    return phases_.conjugate().asDiagonal() * out;
}

CMatrix UnitaryOperator::matrix() const {
    const auto d = static_cast<Eigen::Index>(dim_);
    if (kind_ == Kind::dense) return dense_;
    return apply(CMatrix::Identity(d, d));
}

CMatrix haar_unitary(std::size_t dim, Rng& rng) { return UnitaryOperator::haar(dim, rng).matrix(); }

CMatrix haar_unitary(std::size_t dim, std::uint64_t seed) {
    Rng rng(seed, {0x4841u});
    return haar_unitary(dim, rng);
}

ChannelMatrix::ChannelMatrix(CMatrix u, CMatrix v, SingularSpectrum spectrum)
    : u_(UnitaryOperator::from_dense(std::move(u))),
      v_(UnitaryOperator::from_dense(std::move(v))),
      spectrum_(std::move(spectrum)) {
    check();
}

ChannelMatrix::ChannelMatrix(UnitaryOperator u, UnitaryOperator v, SingularSpectrum spectrum)
    : u_(std::move(u)), v_(std::move(v)), spectrum_(std::move(spectrum)) {
    check();
}

void ChannelMatrix::check() const {
    spectrum_.validate();
    if (u_.dim() != spectrum_.m || v_.dim() != spectrum_.n)
        throw Error(ErrorCode::invalid_dimension, "ChannelMatrix: U must be MxM and V NxN");
}

ChannelMatrix ChannelMatrix::draw(const SingularSpectrum& spectrum, Rng& rng, LeftUnitary left) {
    // Small factors are multiplied out: dense products beat the reflector sweep there.
    auto densify = [](UnitaryOperator q) {
        return q.dim() <= kDenseLimit ? UnitaryOperator::from_dense(q.matrix()) : q;
    };
    auto v = densify(UnitaryOperator::haar(spectrum.n, rng));
    auto u = left == LeftUnitary::haar ? densify(UnitaryOperator::haar(spectrum.m, rng))
                                       : UnitaryOperator::identity(spectrum.m);
    return ChannelMatrix(std::move(u), std::move(v), spectrum);
}

CMatrix ChannelMatrix::apply(const CMatrix& x) const {
    const auto t = static_cast<Eigen::Index>(spectrum_.sigmas.size());
    CMatrix vx = v_.apply(x);
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(m()), x.cols());
    for (Eigen::Index i = 0; i < t; ++i) out.row(i) = spectrum_.sigmas[static_cast<std::size_t>(i)] * vx.row(i);
    return u_.apply(out);
}

CMatrix ChannelMatrix::matched_filter_v_basis(const CMatrix& y) const {
    const auto t = static_cast<Eigen::Index>(spectrum_.sigmas.size());
    const CMatrix uy = u_.apply_adjoint(y);
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(n()), y.cols());
    for (Eigen::Index i = 0; i < t; ++i) out.row(i) = spectrum_.sigmas[static_cast<std::size_t>(i)] * uy.row(i);
    return out;
}

CMatrix ChannelMatrix::dense() const {
    return apply(CMatrix::Identity(static_cast<Eigen::Index>(n()), static_cast<Eigen::Index>(n())));
}

double omega_L(const SingularSpectrum& spectrum, double snr, double rho) {
    if (!(rho >= 0.0)) throw Error(ErrorCode::invalid_argument, "omega_L: rho must be >= 0");
    double acc = 0.0;
    for (double s : spectrum.sigmas) {
        const double d = snr * s * s + rho;
        if (!(d > 0.0))
            throw Error(ErrorCode::singularity, "omega_L: zero eigenvalue at rho = 0");
        acc += 1.0 / d;
    }
    if (spectrum.zero_modes() > 0) {
        if (!(rho > 0.0))
            throw Error(ErrorCode::singularity,
                        "omega_L: rank-deficient channel (N > M) requires rho > 0");
        acc += static_cast<double>(spectrum.zero_modes()) / rho;
    }
    return acc / static_cast<double>(spectrum.n);
}

double omega_L_complement(const SingularSpectrum& spectrum, double snr, double rho) {
    double acc = 0.0;
    for (double s : spectrum.sigmas) {
        const double a = snr * s * s;
        if (a > 0.0) acc += a / (a + rho);
    }
    return acc / static_cast<double>(spectrum.n);
}

SingularSpectrum ChannelSpec::spectrum(std::uint64_t index) const {
    switch (kind) {
    case SpectrumKind::conditioned:
        return make_conditioned_spectrum(m, n, kappa);
    case SpectrumKind::iid:
        break;
    }
    // Mix the realization index into the seed without colliding with the V/U streams.
    Rng mix(seed, {0x49494400u, index});
    return make_iid_gaussian_spectrum(m, n, mix.engine()());
}

ChannelMatrix ChannelSpec::realize(std::uint64_t index) const {
    Rng rng(seed, {0x43484eu, index});
    return ChannelMatrix::draw(spectrum(index), rng, left);
}

std::string to_string(SpectrumKind kind) {
    return kind == SpectrumKind::iid ? "iid" : "conditioned";
}

SpectrumKind spectrum_kind_from_string(const std::string& s) {
    if (s == "iid") return SpectrumKind::iid;
    if (s == "conditioned") return SpectrumKind::conditioned;
    throw Error(ErrorCode::config, "unknown spectrum_kind '" + s + "' (expected iid|conditioned)");
}

} // namespace gmumimo
