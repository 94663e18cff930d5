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

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "gmumimo/channel.hpp"
#include "gmumimo/coding.hpp"
#include "gmumimo/constellation.hpp"
#include "gmumimo/multiuser.hpp"

namespace gmumimo {

inline constexpr double kVarianceFloor = 1e-12;

/// How the detector sets v_s after each NLD step.
enum class VarianceEstimate {
    posterior,  ///< from the NLD's own MMSE (analytic Omega_S or decoder posteriors)
    residual,   ///< (|y - A s|^2 / L - M / snr) / tr(A^H A), independent of the NLD
};

struct DetectorOptions {
    int max_iters = 30;
    double tol = 1e-9;      ///< stop when |v_t - v_{t-1}| < tol
    int bp_iters = 30;      ///< BP iterations per NLD call
    double damping = 1.0;   ///< weight of the new (s, v_s); 1 disables damping
    bool stop_when_decoded = true;
    VarianceEstimate variance = VarianceEstimate::posterior;
};

struct DetectorState {
    CMatrix s;
    CMatrix r;
    double v_s = 1.0;
    double rho = 0.0;
    int iter = 0;
};

struct IterationRecord {
    int iter = 0;
    double rho = 0.0;
    double v = 1.0;
    double mse_r = std::numeric_limits<double>::quiet_NaN();
    double mse_s = std::numeric_limits<double>::quiet_NaN();
};

struct Trajectory {
    std::vector<IterationRecord> records;
    bool genie = false;
    bool halted = false;
    std::string halt_reason;

    /// Rows iter,rho,v,mse_r,mse_s; the mse columns are empty outside genie mode.
    void write_csv(std::ostream& os) const;
};

/// LMMSE detector in the V basis. Holds the matched-filter output of one received block.
class LinearDetector {
public:
    LinearDetector(const ChannelMatrix& channel, const CMatrix& y, double snr);

    struct Output {
        CMatrix r;
        double rho;
    };
    Output step(const CMatrix& s, double v_s) const;

private:
    const ChannelMatrix& channel_;
    double snr_;
    CMatrix mf_;                  // Lambda^T U^H y, N x L
    std::vector<double> lambda_;  // N eigenvalues of A^H A
};

LinearDetector::Output ld_step(const CMatrix& s, double v_s, const ChannelMatrix& channel, const CMatrix& y,
                               double snr);

struct NldOutput {
    CMatrix s;
    CMatrix posterior_mean;
    double v_s = 1.0;
    double omega = 1.0;   ///< MMSE estimate fed to the orthogonalization
};

/// Symbol-wise MMSE with the analytic Omega_S(rho).
NldOutput nld_uncoded_step(const CMatrix& r, double rho, const Constellation& c);

struct CodedNldOutput : NldOutput {
    std::vector<double> group_variance;
    std::vector<DecodeResult> decodes;   ///< one per user
};

/// APP decoding of every user's codeword; group_codes[g] serves all users of group g.
/// Passthrough groups use the analytic Omega_S as their variance.
CodedNldOutput nld_coded_step(const CMatrix& r, double rho, const Constellation& c, const UserLayout& layout,
                              const std::vector<const LdpcCode*>& group_codes, int bp_iters);

struct DetectionResult {
    CMatrix x_hat;                      ///< last NLD posterior means (N x L)
    std::vector<Bits> user_bits;        ///< uncoded: demapped bits; coded: decoded codewords
    std::vector<bool> user_converged;   ///< coded mode only
    Trajectory trajectory;
    int iterations = 0;
};

/// Alternating LD/NLD iteration from s = 0, v_s = 1. Coded mode when group_codes is
/// non-empty. A non-null x_true enables genie MSE records.
DetectionResult run_detector(const CMatrix& y, const ChannelMatrix& channel, double snr, const Constellation& c,
                             const UserLayout& layout, const std::vector<const LdpcCode*>& group_codes,
                             const DetectorOptions& opt, const CMatrix* x_true = nullptr);

} // namespace gmumimo
