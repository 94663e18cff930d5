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

#include "gmumimo/error.hpp"

namespace gmumimo {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::invalid_dimension: return "invalid_dimension";
    case ErrorCode::invalid_condition_number: return "invalid_condition_number";
    case ErrorCode::singularity: return "singularity";
    case ErrorCode::degenerate_channel: return "degenerate_channel";
    case ErrorCode::non_contracting: return "non_contracting";
    case ErrorCode::range: return "range";
    case ErrorCode::no_fixed_point: return "no_fixed_point";
    case ErrorCode::infeasible_allocation: return "infeasible_allocation";
    case ErrorCode::construction: return "construction";
    case ErrorCode::invalid_profile: return "invalid_profile";
    case ErrorCode::framing: return "framing";
    case ErrorCode::numerical: return "numerical";
    case ErrorCode::config: return "config";
    case ErrorCode::io: return "io";
    }
    return "unknown";
}

} // namespace gmumimo
