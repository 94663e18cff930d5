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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gmumimo/channel.hpp"
#include "gmumimo/coding.hpp"
#include "gmumimo/detector.hpp"
#include "gmumimo/multiuser.hpp"
#include "gmumimo/state_evolution.hpp"

namespace gmumimo {

struct CodeSpec {
    std::string kind = "uncoded";   ///< regular | irregular | uncoded
    std::size_t n = 0;
    int dv = 0;
    int dc = 0;
    EdgeProfile lambda;
    EdgeProfile rho;
    std::uint64_t seed = 1;

    LdpcCode build() const;
};

enum class Mode { uncoded, coded, genie };

struct ThresholdSpec {
    std::vector<double> rho_db;     ///< grid of the code transfer measurement
    int trials = 100;
    double eps_gap = 1e-6;
    double decoded_floor = 1e-3;
    double snr_lo_db = -5.0;
    double snr_hi_db = 20.0;
};

struct SeValidationSpec {
    std::size_t seeds = 100;
    int iters = 10;
};

struct SimConfig {
    ChannelSpec channel;
    std::optional<double> beta;
    std::uint64_t channel_reuse = 1;
    std::string constellation = "qpsk";
    std::vector<double> snr_db;
    UserLayout layout;
    std::vector<double> gammas;
    std::vector<CodeSpec> codes;
    Mode mode = Mode::uncoded;
    std::uint64_t trials = 100;
    std::uint64_t target_frame_errors = 100;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    DetectorOptions detector;
    double capacity_tol = 1e-6;
    std::size_t chart_points = 512;
    ThresholdSpec threshold;
    SeValidationSpec se_validation;

    /// Compact JSON of the effective configuration, keys sorted; hashed into the manifest.
    std::string canonical() const;
    void validate() const;
};

/// "a:step:b" (inclusive) or a single value.
std::vector<double> parse_snr_range(const std::string& text);

/// Throws Error(config) on malformed input or inconsistent values.
SimConfig parse_config(const std::string& json_text);
/// Throws Error(io) naming the path when the file cannot be read.
SimConfig load_config(const std::filesystem::path& path);

std::string to_string(Mode mode);

} // namespace gmumimo
