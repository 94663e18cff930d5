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

#include <stdexcept>
#include <string>
#include <vector>

namespace gmumimo {

enum class ErrorCode {
    invalid_argument,
    invalid_dimension,
    invalid_condition_number,
    singularity,
    degenerate_channel,
    non_contracting,
    range,
    no_fixed_point,
    infeasible_allocation,
    construction,
    invalid_profile,
    framing,
    numerical,
    config,
    io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Argument outside the attainable interval [lo, hi] of a monotone map.
class RangeError : public Error {
public:
    RangeError(const std::string& what, double lo, double hi)
        : Error(ErrorCode::range, what), lo_(lo), hi_(hi) {}
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

class NoFixedPointError : public Error {
public:
    NoFixedPointError(const std::string& what, bool nld_below_ld)
        : Error(ErrorCode::no_fixed_point, what), nld_below_ld_(nld_below_ld) {}
    /// True when the NLD curve lies entirely below the LD curve on the scan.
    bool nld_below_ld() const noexcept { return nld_below_ld_; }

private:
    bool nld_below_ld_;
};

class InfeasibleAllocationError : public Error {
public:
    InfeasibleAllocationError(const std::string& what, double rho, std::vector<std::size_t> groups)
        : Error(ErrorCode::infeasible_allocation, what), rho_(rho), groups_(std::move(groups)) {}
    double rho() const noexcept { return rho_; }
    const std::vector<std::size_t>& binding_groups() const noexcept { return groups_; }

private:
    double rho_;
    std::vector<std::size_t> groups_;
};

/// A quadrature node whose integrand could not be evaluated.
class NodeFailureError : public Error {
public:
    NodeFailureError(const std::string& what, double node)
        : Error(ErrorCode::no_fixed_point, what), node_(node) {}
    double node() const noexcept { return node_; }

private:
    double node_;
};

} // namespace gmumimo
