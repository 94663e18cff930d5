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

#include <functional>
#include <span>

namespace gmumimo {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive Gauss–Kronrod integral of f over [a, b].
///
/// The interval is split at every breakpoint strictly inside (a, b) so that
/// kinks of the integrand sit on panel edges. `tol` is the requested
/// absolute error over the whole interval.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double tol, std::span<const double> breakpoints = {});

} // namespace gmumimo
