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
#include <cstdint>
#include <string>
#include <vector>

#include "gmumimo/random.hpp"
#include "gmumimo/types.hpp"

namespace gmumimo {

/// Singular values of an M x N channel, normalized so that tr{A^H A}/N = 1.
struct SingularSpectrum {
    std::vector<double> sigmas;  ///< nonincreasing, length min(m, n)
    std::size_t m = 0;           ///< receive antennas
    std::size_t n = 0;           ///< transmit antennas

    double beta() const { return static_cast<double>(n) / static_cast<double>(m); }
    /// Number of zero eigenvalues of A^H A (N - min(M, N)).
    std::size_t zero_modes() const { return n - sigmas.size(); }
    /// The N eigenvalues of A^H A, squared singular values padded with zeros.
    std::vector<double> eigenvalues() const;
    bool is_flat(double rel_tol = 1e-12) const;

    /// Throws if sigmas are negative, increasing, wrongly sized or not normalized.
    void validate() const;
};

SingularSpectrum make_conditioned_spectrum(std::size_t m, std::size_t n, double kappa);
SingularSpectrum make_iid_gaussian_spectrum(std::size_t m, std::size_t n, std::uint64_t seed);

/// Unitary matrix held as the identity, a dense matrix, or a product of
/// Householder reflections times a diagonal phase.
class UnitaryOperator {
public:
    static UnitaryOperator identity(std::size_t dim);
    static UnitaryOperator from_dense(CMatrix q);
    /// Haar draw with O(dim^2) storage and work: the Householder factors of a
    /// complex Gaussian matrix, generated column by column, with the diagonal of R
    /// made real-positive.
    static UnitaryOperator haar(std::size_t dim, Rng& rng);

    std::size_t dim() const { return dim_; }
    bool is_identity() const { return kind_ == Kind::identity; }
    /// Q X
    CMatrix apply(const CMatrix& x) const;
    /// Q^H X
    CMatrix apply_adjoint(const CMatrix& x) const;
    CMatrix matrix() const;

private:
    enum class Kind { identity, dense, householder };
    Kind kind_ = Kind::identity;
    std::size_t dim_ = 0;
    CMatrix dense_;
    std::vector<CVector> reflectors_;  // unit u_k acting on rows k.., H_k = I - 2 u_k u_k^H
    CVector phases_;
};

/// Dense Haar-distributed dim x dim unitary.
CMatrix haar_unitary(std::size_t dim, Rng& rng);
CMatrix haar_unitary(std::size_t dim, std::uint64_t seed);

enum class LeftUnitary { haar, identity };

/// A = U Lambda V held in factored form. V is Haar; U is Haar or the identity
/// (both keep A right-unitarily invariant). Immutable after construction.
class ChannelMatrix {
public:
    ChannelMatrix(CMatrix u, CMatrix v, SingularSpectrum spectrum);
    ChannelMatrix(UnitaryOperator u, UnitaryOperator v, SingularSpectrum spectrum);

    static ChannelMatrix draw(const SingularSpectrum& spectrum, Rng& rng,
                              LeftUnitary left = LeftUnitary::haar);

    CMatrix u() const { return u_.matrix(); }
    CMatrix v() const { return v_.matrix(); }
    const UnitaryOperator& u_op() const { return u_; }
    const UnitaryOperator& v_op() const { return v_; }
    const SingularSpectrum& spectrum() const { return spectrum_; }
    std::size_t m() const { return spectrum_.m; }
    std::size_t n() const { return spectrum_.n; }
    double beta() const { return spectrum_.beta(); }
    bool left_is_identity() const { return u_.is_identity(); }

    /// A X for an N x L block.
    CMatrix apply(const CMatrix& x) const;
    /// Lambda^T U^H Y for an M x L block: the matched-filter output in the V basis (N x L).
    CMatrix matched_filter_v_basis(const CMatrix& y) const;
    /// Dense A; intended for small-dimension checks only.
    CMatrix dense() const;

private:
    void check() const;

    UnitaryOperator u_;
    UnitaryOperator v_;
    SingularSpectrum spectrum_;
};

/// (1/N) sum_i 1/(snr*lambda_i + rho) over the N eigenvalues of A^H A.
double omega_L(const SingularSpectrum& spectrum, double snr, double rho);

/// (1/N) sum_i snr*lambda_i/(snr*lambda_i + rho), i.e. 1 - rho*Omega_L(rho) without cancellation.
double omega_L_complement(const SingularSpectrum& spectrum, double snr, double rho);

enum class SpectrumKind { iid, conditioned };

/// Structured description of a channel ensemble, as read from configuration.
struct ChannelSpec {
    std::size_t m = 0;
    std::size_t n = 0;
    SpectrumKind kind = SpectrumKind::iid;
    double kappa = 1.0;
    std::uint64_t seed = 1;
    LeftUnitary left = LeftUnitary::haar;

    /// Spectrum of realization `index` (conditioned spectra do not depend on it).
    SingularSpectrum spectrum(std::uint64_t index = 0) const;
    /// Full channel realization `index`, reproducible from (seed, index).
    ChannelMatrix realize(std::uint64_t index) const;
};

std::string to_string(SpectrumKind kind);
SpectrumKind spectrum_kind_from_string(const std::string& s);

} // namespace gmumimo
