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
#include <functional>
#include <ostream>
#include <vector>

#include "gmumimo/coding.hpp"
#include "gmumimo/config.hpp"
#include "gmumimo/constellation.hpp"

namespace gmumimo {

/// Runs fn(0..count-1) on up to `workers` threads. fn must only write to its own slot.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

struct BerRecord {
    double snr_db = 0.0;
    std::vector<std::uint64_t> bit_errors;     ///< per group
    std::vector<std::uint64_t> bits;           ///< per group
    std::vector<std::uint64_t> group_frame_errors;
    std::uint64_t frames = 0;
    std::uint64_t frame_errors = 0;
    double mean_iterations = 0.0;
    double wall_seconds = 0.0;                 ///< not part of the CSV

    double ber(std::size_t g) const;
    std::uint64_t total_bit_errors() const;
    std::uint64_t total_bits() const;
    double total_ber() const;
};

struct FrameOutcome {
    std::vector<std::uint64_t> bit_errors;
    std::vector<std::uint64_t> bits;
    std::vector<bool> group_error;
    int iterations = 0;
};

/// One transmitted block at SNR index `snr_index`. Data and noise depend only on
/// (seed, frame); the channel on frame / reuse.
FrameOutcome simulate_frame(const SimConfig& cfg, const Constellation& c, const std::vector<LdpcCode>& codes,
                            std::size_t snr_index, std::uint64_t frame);

/// Codes of the configured groups; empty outside coded mode.
std::vector<LdpcCode> build_group_codes(const SimConfig& cfg);

/// Frames are simulated in fixed-size chunks and merged in frame order, so the
/// stopping point and every count are independent of the worker count.
std::vector<BerRecord> run_ber(const SimConfig& cfg,
                               const std::function<void(const BerRecord&)>& on_point = {});

void write_ber_csv(std::ostream& os, const std::vector<BerRecord>& records);

struct SeValidationRow {
    int iter = 0;
    double mse_r = 0.0;      ///< empirical E|r - x|^2
    double se_mse_r = 0.0;   ///< 1 / rho_t
    double gap_r = 0.0;
    double mse_s = 0.0;      ///< empirical E|s - x|^2
    double se_v = 0.0;       ///< v_t
    double gap_s = 0.0;
};

struct SeValidationReport {
    double snr_db = 0.0;
    std::size_t seeds = 0;
    std::vector<SeValidationRow> rows;
    double v_star = 0.0;
    double terminal_mse = 0.0;
    double terminal_gap = 0.0;
    double max_gap = 0.0;    ///< over both columns and all iterations
};

/// Genie-mode detector against SE, averaged over se_validation.seeds channel draws.
std::vector<SeValidationReport> run_se_validation(const SimConfig& cfg);

void write_se_validation_csv(std::ostream& os, const std::vector<SeValidationReport>& reports);
void write_se_summary_csv(std::ostream& os, const std::vector<SeValidationReport>& reports);

/// Measured decoder transfer curve rho -> MSE: nonincreasing, interpolated
/// log-linearly in (ln rho, ln mse). Below the grid it follows Omega_S; above
/// it holds the last value.
class TransferCurve {
public:
    TransferCurve(const Constellation& c, std::vector<TransferPoint> points);
    double operator()(double rho) const;
    const std::vector<TransferPoint>& points() const { return points_; }

private:
    Constellation c_;
    std::vector<TransferPoint> points_;
    std::vector<double> log_rho_;
    std::vector<double> log_mse_;
};

struct CodedThreshold {
    std::vector<std::vector<TransferPoint>> group_points;
    std::vector<TransferPoint> average;   ///< group mean, the NLD of the whole detector
    double snr = 0.0;                     ///< linear; +inf when the tunnel never opens
    double snr_db = 0.0;
};

/// SE threshold of the coded detector from measured per-group transfer curves.
CodedThreshold coded_se_threshold(const SimConfig& cfg, const std::vector<LdpcCode>& codes);

void write_transfer_csv(std::ostream& os, const CodedThreshold& t);

} // namespace gmumimo
