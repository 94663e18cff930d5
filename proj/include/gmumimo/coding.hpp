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
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gmumimo/constellation.hpp"
#include "gmumimo/types.hpp"

namespace gmumimo {

/// Binary LDPC code given by the adjacency of its parity-check matrix, with a
/// systematic encoder derived from the reduced row echelon form of H.
class LdpcCode {
public:
    /// checks[c] lists the variable nodes of check c.
    LdpcCode(std::size_t n, std::vector<std::vector<std::uint32_t>> checks, double design_rate);

    /// Rate-1 code without checks.
    static LdpcCode passthrough(std::size_t n);

    std::size_t n() const { return n_; }
    std::size_t m() const { return checks_.size(); }
    std::size_t k() const { return info_pos_.size(); }
    std::size_t rank() const { return n_ - k(); }
    double rate() const { return static_cast<double>(k()) / static_cast<double>(n_); }
    double design_rate() const { return design_rate_; }
    bool is_passthrough() const { return checks_.empty(); }
    std::size_t edges() const { return edge_var_.size(); }

    const std::vector<std::vector<std::uint32_t>>& checks() const { return checks_; }
    const std::vector<std::vector<std::uint32_t>>& variables() const { return vars_; }
    const std::vector<std::uint32_t>& info_positions() const { return info_pos_; }

    Bits encode(std::span<const std::uint8_t> info) const;
    Bits extract_info(std::span<const std::uint8_t> codeword) const;
    bool is_codeword(std::span<const std::uint8_t> bits) const;

    /// Length of the shortest cycle of the Tanner graph; max() when acyclic.
    std::size_t girth() const;

    std::string to_alist() const;

    // Edge layout used by the decoder: edges of check c are [check_start[c], check_start[c+1]).
    const std::vector<std::uint32_t>& check_start() const { return check_start_; }
    const std::vector<std::uint32_t>& edge_var() const { return edge_var_; }
    const std::vector<std::uint32_t>& var_start() const { return var_start_; }
    const std::vector<std::uint32_t>& var_edges() const { return var_edges_; }

private:
    void build_encoder();

    std::size_t n_ = 0;
    double design_rate_ = 1.0;
    std::vector<std::vector<std::uint32_t>> checks_;
    std::vector<std::vector<std::uint32_t>> vars_;
    std::vector<std::uint32_t> check_start_;
    std::vector<std::uint32_t> edge_var_;
    std::vector<std::uint32_t> var_start_;
    std::vector<std::uint32_t> var_edges_;

    std::vector<std::uint32_t> info_pos_;
    std::vector<std::uint32_t> parity_pos_;
    std::vector<std::vector<std::uint64_t>> parity_masks_;  // over packed info bits
};

/// Progressive-edge-growth construction with every check degree dc.
LdpcCode build_regular(std::size_t n, int dv, int dc, std::uint64_t seed);

/// Edge-perspective degree distribution: (degree, fraction of edges).
using EdgeProfile = std::vector<std::pair<int, double>>;

LdpcCode build_irregular(std::size_t n, const EdgeProfile& lambda, const EdgeProfile& rho, std::uint64_t seed);

struct DecodeResult {
    std::vector<double> llr;   ///< posterior LLRs log P(0)/P(1), channel plus extrinsic
    Bits hard;
    bool converged = false;
    int iterations = 0;
    double avg_symbol_variance = std::numeric_limits<double>::quiet_NaN();
};

/// Sum-product decoding with flooding schedule; stops once the hard decision is a codeword.
DecodeResult bp_decode(const LdpcCode& code, std::span<const double> channel_llrs, int max_iters);

struct AppSymbols {
    std::vector<cplx> mean;
    std::vector<double> var;
    DecodeResult decode;
};

/// Symbol posteriors of one codeword observed as r = x + rho^{-1/2} z: bit LLRs,
/// BP, then per-symbol posteriors with the decoder's extrinsic LLRs as bit priors.
AppSymbols app_decode_symbols(const LdpcCode& code, const Constellation& c, std::span<const cplx> r,
                              double rho, int bp_iters);

struct TransferPoint {
    double rho;
    double mse;
    double std_err;
};

/// Monte-Carlo MSE of app_decode_symbols against the transmitted symbols.
std::vector<TransferPoint> measure_code_transfer(const LdpcCode& code, const Constellation& c,
                                                 const std::vector<double>& rho_grid, int trials,
                                                 std::uint64_t seed, int bp_iters = 30);

} // namespace gmumimo
