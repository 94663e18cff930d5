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

#include "gmumimo/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gmumimo/error.hpp"

namespace gmumimo {

namespace {

struct Panel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel evaluate(const std::function<double(double)>& f, double a, double b) {
    using gk = boost::math::quadrature::gauss_kronrod<double, 31>;
    double err = 0.0;
    const double v = gk::integrate(f, a, b, 0, 0.0, &err);
    return {a, b, v, err};
}

constexpr std::size_t kMaxPanels = 4000;

} // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double tol, std::span<const double> breakpoints) {
    if (!(b >= a)) throw Error(ErrorCode::invalid_argument, "integrate: b < a");
    if (b == a) return {};

    std::vector<double> edges{a};
    for (double p : breakpoints)
        if (p > a && p < b) edges.push_back(p);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::priority_queue<Panel> panels;
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        auto p = evaluate(f, edges[i], edges[i + 1]);
        total_err += p.error;
        panels.push(p);
    }
    // Global adaptive bisection of the worst panel.
    while (total_err > tol && panels.size() < kMaxPanels) {
        Panel worst = panels.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;
        panels.pop();
        auto left = evaluate(f, worst.a, mid);
        auto right = evaluate(f, mid, worst.b);
        total_err += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }

    // Sum in interval order so the result does not depend on heap layout.
    std::vector<Panel> all;
    all.reserve(panels.size());
    while (!panels.empty()) {
        all.push_back(panels.top());
        panels.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    QuadratureResult out;
    for (const auto& p : all) {
        out.value += p.value;
        out.error += p.error;
    }
    if (!std::isfinite(out.value)) throw Error(ErrorCode::numerical, "integrate: non-finite result");
    return out;
}

} // namespace gmumimo
