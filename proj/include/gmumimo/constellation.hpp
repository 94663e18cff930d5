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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gmumimo/types.hpp"

namespace gmumimo {

/// One real axis of a product (I x Q) constellation.
struct PamAxis {
    std::vector<double> levels;
    std::vector<double> probs;
};

/// Discrete signaling prior with unit average energy, or the analytic
/// Gaussian prior (no symbols; used for closed-form checks).
class Constellation {
public:
    /// Generic discrete constellation. `labels[i]` is the bit pattern of
    /// symbols[i], most significant bit first in the bit stream.
    Constellation(std::string name, std::vector<cplx> symbols, std::vector<double> probs,
                  std::vector<std::uint32_t> labels, int bits_per_symbol);

    static Constellation bpsk();
    static Constellation qpsk();
    static Constellation qam16();
    static Constellation gaussian();
    /// qpsk | 16qam | bpsk | gaussian
    static Constellation by_name(const std::string& name);

    const std::string& name() const { return name_; }
    bool is_gaussian() const { return gaussian_; }
    const std::vector<cplx>& symbols() const { return symbols_; }
    const std::vector<double>& probs() const { return probs_; }
    const std::vector<double>& log_probs() const { return log_probs_; }
    const std::vector<std::uint32_t>& labels() const { return labels_; }
    int bits_per_symbol() const { return bits_per_symbol_; }
    std::size_t size() const { return symbols_.size(); }
    /// Bit j (0 = first in stream) of symbol i.
    std::uint8_t bit(std::size_t symbol, int j) const {
        return static_cast<std::uint8_t>((labels_[symbol] >> (bits_per_symbol_ - 1 - j)) & 1u);
    }
    /// Symbol index carrying the given label.
    std::size_t index_of_label(std::uint32_t label) const { return by_label_.at(label); }

    /// Present when the constellation is the product of an I and a Q axis.
    const std::optional<std::pair<PamAxis, PamAxis>>& axes() const { return axes_; }

private:
    Constellation() = default;
    void finish();

    std::string name_;
    bool gaussian_ = false;
    std::vector<cplx> symbols_;
    std::vector<double> probs_;
    std::vector<double> log_probs_;
    std::vector<std::uint32_t> labels_;
    std::vector<std::size_t> by_label_;
    int bits_per_symbol_ = 0;
    std::optional<std::pair<PamAxis, PamAxis>> axes_;
};

/// Per-symbol MMSE of x from sqrt(rho) x + z, z ~ CN(0, 1).
///
/// Product constellations are integrated axis by axis with adaptive
/// Gauss–Kronrod; other discrete sets fall back to 2-D Gauss–Hermite.
double omega_S(const Constellation& c, double rho);

/// Same quantity by tensor Gauss–Hermite quadrature of the given order per axis.
double omega_S_gauss_hermite(const Constellation& c, double rho, int order = 32);

struct Posterior {
    cplx mean;
    double var = 0.0;
};

/// Exact posterior mean and variance of x given r = x + rho^{-1/2} z.
Posterior posterior_mean_var(const Constellation& c, cplx r, double rho);

/// Same, with independent bit priors given as LLRs log P(b=0)/P(b=1).
Posterior posterior_mean_var(const Constellation& c, cplx r, double rho,
                             std::span<const double> bit_prior_llrs);

inline constexpr double kLlrClip = 50.0;

std::vector<cplx> modulate(const Constellation& c, std::span<const std::uint8_t> bits);

/// Exact bit LLRs log P(b=0|r)/P(b=1|r) at noise precision rho, clipped at +-50.
std::vector<double> demodulate_llr(const Constellation& c, std::span<const cplx> r, double rho);

/// Nearest-symbol bit decisions.
Bits hard_demodulate(const Constellation& c, std::span<const cplx> r);

/// Index of the symbol closest to r.
std::size_t nearest_symbol(const Constellation& c, cplx r);

} // namespace gmumimo
