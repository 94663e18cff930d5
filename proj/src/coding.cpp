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

#include "gmumimo/coding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

#include "gmumimo/error.hpp"
#include "gmumimo/random.hpp"

namespace gmumimo {

namespace {

constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }

} // namespace

LdpcCode::LdpcCode(std::size_t n, std::vector<std::vector<std::uint32_t>> checks, double design_rate)
    : n_(n), design_rate_(design_rate), checks_(std::move(checks)) {
    if (n_ == 0) throw Error(ErrorCode::construction, "LDPC code: n must be positive");
    vars_.assign(n_, {});
    for (std::size_t c = 0; c < checks_.size(); ++c) {
        auto& row = checks_[c];
        std::sort(row.begin(), row.end());
        if (std::adjacent_find(row.begin(), row.end()) != row.end())
            throw Error(ErrorCode::construction, "LDPC code: repeated edge in check " + std::to_string(c));
        for (auto v : row) {
            if (v >= n_) throw Error(ErrorCode::construction, "LDPC code: variable index out of range");
            vars_[v].push_back(static_cast<std::uint32_t>(c));
        }
    }
    check_start_.push_back(0);
    for (const auto& row : checks_) {
        for (auto v : row) edge_var_.push_back(v);
        check_start_.push_back(static_cast<std::uint32_t>(edge_var_.size()));
    }
    std::vector<std::vector<std::uint32_t>> per_var(n_);
    for (std::uint32_t e = 0; e < edge_var_.size(); ++e) per_var[edge_var_[e]].push_back(e);
    var_start_.push_back(0);
    for (const auto& list : per_var) {
        var_edges_.insert(var_edges_.end(), list.begin(), list.end());
        var_start_.push_back(static_cast<std::uint32_t>(var_edges_.size()));
    }
    build_encoder();
}

LdpcCode LdpcCode::passthrough(std::size_t n) { return LdpcCode(n, {}, 1.0); }

void LdpcCode::build_encoder() {
    const std::size_t m = checks_.size();
    const std::size_t w = words_for(n_);
    std::vector<std::vector<std::uint64_t>> rows(m, std::vector<std::uint64_t>(w, 0));
    for (std::size_t c = 0; c < m; ++c)
        for (auto v : checks_[c]) rows[c][v / 64] |= std::uint64_t{1} << (v % 64);

    // Reduced row echelon form over GF(2); pivot columns become parity positions.
    std::vector<std::uint32_t> pivots;
    std::size_t r = 0;
    for (std::size_t col = 0; col < n_ && r < m; ++col) {
        const std::size_t wi = col / 64;
        const std::uint64_t bit = std::uint64_t{1} << (col % 64);
        std::size_t p = r;
        while (p < m && !(rows[p][wi] & bit)) ++p;
        if (p == m) continue;
        std::swap(rows[p], rows[r]);
        for (std::size_t i = 0; i < m; ++i) {
            if (i == r || !(rows[i][wi] & bit)) continue;
            for (std::size_t j = wi; j < w; ++j) rows[i][j] ^= rows[r][j];
        }
        pivots.push_back(static_cast<std::uint32_t>(col));
        ++r;
    }
    parity_pos_ = pivots;
    std::vector<char> is_pivot(n_, 0);
    for (auto p : pivots) is_pivot[p] = 1;
    info_pos_.clear();
    for (std::uint32_t j = 0; j < n_; ++j)
        if (!is_pivot[j]) info_pos_.push_back(j);

    const std::size_t kw = words_for(info_pos_.size());
    parity_masks_.assign(r, std::vector<std::uint64_t>(kw, 0));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t q = 0; q < info_pos_.size(); ++q) {
            const auto col = info_pos_[q];
            if (rows[i][col / 64] & (std::uint64_t{1} << (col % 64)))
                parity_masks_[i][q / 64] |= std::uint64_t{1} << (q % 64);
        }
}

Bits LdpcCode::encode(std::span<const std::uint8_t> info) const {
    if (info.size() != k()) throw Error(ErrorCode::framing, "encode: expected k information bits");
    std::vector<std::uint64_t> packed(words_for(info.size()), 0);
    Bits out(n_, 0);
    for (std::size_t q = 0; q < info.size(); ++q) {
        const std::uint8_t b = info[q] & 1u;
        out[info_pos_[q]] = b;
        if (b) packed[q / 64] |= std::uint64_t{1} << (q % 64);
    }
    for (std::size_t i = 0; i < parity_pos_.size(); ++i) {
        int acc = 0;
        for (std::size_t j = 0; j < packed.size(); ++j) acc ^= std::popcount(packed[j] & parity_masks_[i][j]) & 1;
        out[parity_pos_[i]] = static_cast<std::uint8_t>(acc);
    }
    return out;
}

Bits LdpcCode::extract_info(std::span<const std::uint8_t> codeword) const {
    if (codeword.size() != n_) throw Error(ErrorCode::framing, "extract_info: expected n bits");
    Bits out;
    out.reserve(k());
    for (auto p : info_pos_) out.push_back(codeword[p]);
    return out;
}

bool LdpcCode::is_codeword(std::span<const std::uint8_t> bits) const {
    if (bits.size() != n_) return false;
    for (const auto& row : checks_) {
        int acc = 0;
        for (auto v : row) acc ^= bits[v] & 1;
        if (acc) return false;
    }
    return true;
}

std::size_t LdpcCode::girth() const {
    // Shortest cycle through each variable node by BFS over the bipartite graph.
    // Nodes: variables [0, n), checks [n, n + m).
    const std::size_t total = n_ + checks_.size();
    std::size_t best = std::numeric_limits<std::size_t>::max();
    std::vector<std::uint32_t> dist(total, kUnreached);
    std::vector<std::uint32_t> parent(total, kUnreached);
    std::vector<std::uint32_t> touched;
    for (std::uint32_t root = 0; root < n_; ++root) {
        for (auto t : touched) {
            dist[t] = kUnreached;
            parent[t] = kUnreached;
        }
        touched.clear();
        std::queue<std::uint32_t> q;
        dist[root] = 0;
        touched.push_back(root);
        q.push(root);
        while (!q.empty()) {
            const auto u = q.front();
            q.pop();
            if (2 * dist[u] + 2 >= best) break;
            auto visit = [&](std::uint32_t nb) {
                if (nb == parent[u]) return;
                if (dist[nb] == kUnreached) {
                    dist[nb] = dist[u] + 1;
                    parent[nb] = u;
                    touched.push_back(nb);
                    q.push(nb);
                } else {
                    best = std::min<std::size_t>(best, dist[u] + dist[nb] + 1);
                }
            };
            if (u < n_) {
                for (auto c : vars_[u]) visit(static_cast<std::uint32_t>(n_ + c));
            } else {
                for (auto v : checks_[u - n_]) visit(v);
            }
        }
    }
    return best;
}

std::string LdpcCode::to_alist() const {
    std::ostringstream os;
    std::size_t max_col = 0;
    std::size_t max_row = 0;
    for (const auto& v : vars_) max_col = std::max(max_col, v.size());
    for (const auto& c : checks_) max_row = std::max(max_row, c.size());
    os << n_ << ' ' << checks_.size() << '\n' << max_col << ' ' << max_row << '\n';
    for (std::size_t j = 0; j < n_; ++j) os << vars_[j].size() << (j + 1 < n_ ? ' ' : '\n');
    for (std::size_t c = 0; c < checks_.size(); ++c) os << checks_[c].size() << (c + 1 < checks_.size() ? ' ' : '\n');
    for (const auto& v : vars_) {
        for (std::size_t i = 0; i < max_col; ++i) os << (i < v.size() ? v[i] + 1 : 0) << (i + 1 < max_col ? ' ' : '\n');
    }
    for (const auto& c : checks_) {
        for (std::size_t i = 0; i < max_row; ++i) os << (i < c.size() ? c[i] + 1 : 0) << (i + 1 < max_row ? ' ' : '\n');
    }
    return os.str();
}

namespace {

// Progressive edge growth: each new edge of a variable goes to a check with free
// capacity that is farthest from it in the current graph, lowest degree first.
std::vector<std::vector<std::uint32_t>> peg(const std::vector<int>& var_deg, const std::vector<int>& check_cap,
                                            std::uint64_t seed) {
    const std::size_t n = var_deg.size();
    const std::size_t m = check_cap.size();
    Rng rng(seed, {0x504547u});
    std::vector<std::vector<std::uint32_t>> checks(m);
    std::vector<std::vector<std::uint32_t>> vars(n);
    std::vector<std::uint32_t> depth(m);
    std::vector<char> var_seen(n, 0);
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return var_deg[a] < var_deg[b]; });

    std::vector<std::uint32_t> cand;
    std::vector<std::uint32_t> frontier;
    std::vector<std::uint32_t> next;
    std::vector<std::uint32_t> seen_vars;
    for (auto j : order) {
        for (int e = 0; e < var_deg[j]; ++e) {
            std::fill(depth.begin(), depth.end(), kUnreached);
            // BFS from j; checks adjacent to j get depth 0.
            frontier.assign(1, j);
            seen_vars.assign(1, j);
            var_seen[j] = 1;
            for (std::uint32_t d = 0; !frontier.empty(); ++d) {
                next.clear();
                for (auto v : frontier)
                    for (auto c : vars[v]) {
                        if (depth[c] != kUnreached) continue;
                        depth[c] = d;
                        for (auto u : checks[c])
                            if (!var_seen[u]) {
                                var_seen[u] = 1;
                                seen_vars.push_back(u);
                                next.push_back(u);
                            }
                    }
                frontier.swap(next);
            }
            for (auto u : seen_vars) var_seen[u] = 0;

            cand.clear();
            std::uint32_t best_depth = 0;
            int best_deg = std::numeric_limits<int>::max();
            for (std::uint32_t c = 0; c < m; ++c) {
                const int deg = static_cast<int>(checks[c].size());
                if (deg >= check_cap[c]) continue;
                if (depth[c] == 0) continue;  // already adjacent to j
                const std::uint32_t dd = depth[c];
                if (cand.empty() || dd > best_depth || (dd == best_depth && deg < best_deg)) {
                    cand.assign(1, c);
                    best_depth = dd;
                    best_deg = deg;
                } else if (dd == best_depth && deg == best_deg) {
                    cand.push_back(c);
                }
            }
            if (cand.empty()) {
                std::ostringstream os;
                os << "PEG: no check with free capacity for variable " << j << " (degree " << var_deg[j] << ")";
                throw Error(ErrorCode::construction, os.str());
            }
            const auto c = cand[rng.index(cand.size())];
            checks[c].push_back(j);
            vars[j].push_back(c);
        }
    }
    return checks;
}

} // namespace

LdpcCode build_regular(std::size_t n, int dv, int dc, std::uint64_t seed) {
    if (n == 0 || dv < 2 || dc < 2)
        throw Error(ErrorCode::construction, "build_regular: need n > 0, dv >= 2, dc >= 2");
    if ((n * static_cast<std::size_t>(dv)) % static_cast<std::size_t>(dc) != 0) {
        std::ostringstream os;
        os << "build_regular: n*dv = " << n * dv << " not divisible by dc = " << dc;
        throw Error(ErrorCode::construction, os.str());
    }
    const std::size_t m = n * static_cast<std::size_t>(dv) / static_cast<std::size_t>(dc);
    if (static_cast<std::size_t>(dv) > m || static_cast<std::size_t>(dc) > n)
        throw Error(ErrorCode::construction, "build_regular: degrees exceed the graph size");
    auto checks = peg(std::vector<int>(n, dv), std::vector<int>(m, dc), seed);
    return LdpcCode(n, std::move(checks), 1.0 - static_cast<double>(dv) / static_cast<double>(dc));
}

namespace {

void validate_profile(const EdgeProfile& p, const char* side, int min_degree) {
    if (p.empty()) throw Error(ErrorCode::invalid_profile, std::string(side) + " profile is empty");
    double sum = 0.0;
    for (const auto& [d, f] : p) {
        if (d < min_degree) {
            std::ostringstream os;
            os << side << " degree " << d << " below the minimum " << min_degree;
            throw Error(ErrorCode::invalid_profile, os.str());
        }
        if (!(f >= 0.0)) throw Error(ErrorCode::invalid_profile, std::string(side) + " profile has a negative fraction");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        std::ostringstream os;
        os << side << " profile fractions sum to " << sum << ", not 1";
        throw Error(ErrorCode::invalid_profile, os.str());
    }
}

// Node counts per degree class from edge fractions, largest remainder rounding to `total`.
std::vector<std::size_t> node_counts(const EdgeProfile& p, std::size_t total) {
    double norm = 0.0;
    for (const auto& [d, f] : p) norm += f / d;
    std::vector<double> exact;
    std::vector<std::size_t> counts;
    std::size_t assigned = 0;
    for (const auto& [d, f] : p) {
        const double x = static_cast<double>(total) * (f / d) / norm;
        exact.push_back(x);
        counts.push_back(static_cast<std::size_t>(std::floor(x)));
        assigned += counts.back();
    }
    std::vector<std::size_t> idx(p.size());
    std::iota(idx.begin(), idx.end(), 0u);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) {
        return exact[a] - std::floor(exact[a]) > exact[b] - std::floor(exact[b]);
    });
    for (std::size_t i = 0; assigned < total; i = (i + 1) % idx.size(), ++assigned) ++counts[idx[i]];
    return counts;
}

} // namespace

LdpcCode build_irregular(std::size_t n, const EdgeProfile& lambda, const EdgeProfile& rho, std::uint64_t seed) {
    if (n == 0) throw Error(ErrorCode::construction, "build_irregular: n must be positive");
    validate_profile(lambda, "variable", 2);
    validate_profile(rho, "check", 2);

    const auto vcounts = node_counts(lambda, n);
    std::vector<int> var_deg;
    std::size_t edges = 0;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        if (lambda[i].second > 0.0 && vcounts[i] == 0) {
            std::ostringstream os;
            os << "build_irregular: variable degree " << lambda[i].first << " gets no nodes at n = " << n;
            throw Error(ErrorCode::invalid_profile, os.str());
        }
        for (std::size_t q = 0; q < vcounts[i]; ++q) var_deg.push_back(lambda[i].first);
        edges += vcounts[i] * static_cast<std::size_t>(lambda[i].first);
    }
    double inv_mean = 0.0;
    for (const auto& [d, f] : rho) inv_mean += f / d;
    const auto m = static_cast<std::size_t>(std::llround(static_cast<double>(edges) * inv_mean));
    if (m == 0) throw Error(ErrorCode::invalid_profile, "build_irregular: profile yields no checks");
    const auto ccounts = node_counts(rho, m);
    std::vector<int> cap;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (rho[i].second > 0.0 && ccounts[i] == 0) {
            std::ostringstream os;
            os << "build_irregular: check degree " << rho[i].first << " gets no nodes at m = " << m;
            throw Error(ErrorCode::invalid_profile, os.str());
        }
        for (std::size_t q = 0; q < ccounts[i]; ++q) cap.push_back(rho[i].first);
    }
    // Match socket totals by moving single edges across checks.
    long diff = static_cast<long>(edges) - std::accumulate(cap.begin(), cap.end(), 0L);
    for (std::size_t i = 0; diff != 0; i = (i + 1) % cap.size()) {
        if (diff > 0) {
            ++cap[i];
            --diff;
        } else if (cap[i] > 2) {
            --cap[i];
            ++diff;
        }
    }
    for (std::size_t i = 0; i < lambda.size(); ++i)
        if (static_cast<std::size_t>(lambda[i].first) > m) {
            std::ostringstream os;
            os << "build_irregular: variable degree " << lambda[i].first << " exceeds the check count " << m;
            throw Error(ErrorCode::invalid_profile, os.str());
        }
    auto checks = peg(var_deg, cap, seed);
    return LdpcCode(n, std::move(checks), 1.0 - static_cast<double>(m) / static_cast<double>(n));
}

DecodeResult bp_decode(const LdpcCode& code, std::span<const double> channel_llrs, int max_iters) {
    const std::size_t n = code.n();
    if (channel_llrs.size() != n) throw Error(ErrorCode::framing, "bp_decode: expected n channel LLRs");
    DecodeResult res;
    res.llr.resize(n);
    res.hard.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double l = std::clamp(channel_llrs[j], -kLlrClip, kLlrClip);
        if (std::isnan(l)) throw Error(ErrorCode::numerical, "bp_decode: NaN channel LLR");
        res.llr[j] = l;
        res.hard[j] = l < 0.0 ? 1 : 0;
    }
    if (code.is_passthrough()) {
        res.converged = std::none_of(res.llr.begin(), res.llr.end(), [](double l) { return l == 0.0; });
        return res;
    }

    const auto& cstart = code.check_start();
    const auto& evar = code.edge_var();
    const auto& vstart = code.var_start();
    const auto& vedges = code.var_edges();
    const std::size_t E = evar.size();
    std::vector<double> v2c(E);
    std::vector<double> c2v(E, 0.0);
    std::vector<double> t(E);
    std::vector<double> fwd;
    for (std::size_t e = 0; e < E; ++e) v2c[e] = res.llr[evar[e]];

    const int iters = std::max(max_iters, 1);
    for (int it = 1; it <= iters; ++it) {
        // Check update: exact tanh rule with prefix/suffix products (no division).
        for (std::size_t c = 0; c + 1 < cstart.size(); ++c) {
            const std::size_t a = cstart[c];
            const std::size_t b = cstart[c + 1];
            const std::size_t d = b - a;
            fwd.resize(d + 1);
            fwd[0] = 1.0;
            for (std::size_t i = 0; i < d; ++i) {
                t[a + i] = std::tanh(0.5 * v2c[a + i]);
                fwd[i + 1] = fwd[i] * t[a + i];
            }
            double bwd = 1.0;
            for (std::size_t i = d; i-- > 0;) {
                const double p = std::clamp(fwd[i] * bwd, -1.0 + 1e-16, 1.0 - 1e-16);
                c2v[a + i] = std::clamp(2.0 * std::atanh(p), -kLlrClip, kLlrClip);
                bwd *= t[a + i];
            }
        }
        // Variable update and tentative decision.
        bool any_zero = false;
        for (std::size_t j = 0; j < n; ++j) {
            double total = std::clamp(channel_llrs[j], -kLlrClip, kLlrClip);
            for (std::size_t q = vstart[j]; q < vstart[j + 1]; ++q) total += c2v[vedges[q]];
            for (std::size_t q = vstart[j]; q < vstart[j + 1]; ++q) {
                const auto e = vedges[q];
                v2c[e] = std::clamp(total - c2v[e], -kLlrClip, kLlrClip);
            }
            total = std::clamp(total, -kLlrClip, kLlrClip);
            res.llr[j] = total;
            res.hard[j] = total < 0.0 ? 1 : 0;
            any_zero = any_zero || total == 0.0;
        }
        res.iterations = it;
        if (!any_zero && code.is_codeword(res.hard)) {
            res.converged = true;
            break;
        }
    }
    return res;
}

AppSymbols app_decode_symbols(const LdpcCode& code, const Constellation& c, std::span<const cplx> r, double rho,
                              int bp_iters) {
    const auto bps = static_cast<std::size_t>(c.bits_per_symbol());
    if (r.size() * bps != code.n())
        throw Error(ErrorCode::framing, "app_decode_symbols: symbol count does not match the code length");
    const auto ch = demodulate_llr(c, r, rho);
    AppSymbols out;
    out.decode = bp_decode(code, ch, bp_iters);
    out.mean.resize(r.size());
    out.var.resize(r.size());
    std::vector<double> ext(bps);
    double acc = 0.0;
    for (std::size_t s = 0; s < r.size(); ++s) {
        for (std::size_t j = 0; j < bps; ++j) {
            const std::size_t b = s * bps + j;
            ext[j] = code.is_passthrough() ? 0.0 : out.decode.llr[b] - ch[b];
        }
        const auto post = posterior_mean_var(c, r[s], rho, ext);
        out.mean[s] = post.mean;
        out.var[s] = post.var;
        acc += post.var;
    }
    out.decode.avg_symbol_variance = r.empty() ? 0.0 : acc / static_cast<double>(r.size());
    return out;
}

std::vector<TransferPoint> measure_code_transfer(const LdpcCode& code, const Constellation& c,
                                                 const std::vector<double>& rho_grid, int trials,
                                                 std::uint64_t seed, int bp_iters) {
    if (trials < 1) throw Error(ErrorCode::invalid_argument, "measure_code_transfer: trials must be >= 1");
    const auto bps = static_cast<std::size_t>(c.bits_per_symbol());
    if (code.n() % bps != 0) throw Error(ErrorCode::framing, "measure_code_transfer: n not a multiple of bits/symbol");
    std::vector<TransferPoint> out;
    for (std::size_t p = 0; p < rho_grid.size(); ++p) {
        const double rho = rho_grid[p];
        double sum = 0.0;
        double sum2 = 0.0;
        for (int t = 0; t < trials; ++t) {
            Rng rng(seed, {0x54524eu, p, static_cast<std::uint64_t>(t)});
            Bits info(code.k());
            for (auto& b : info) b = rng.bit();
            const auto x = modulate(c, code.encode(info));
            std::vector<cplx> r(x.size());
            const double noise = rho > 0.0 ? 1.0 / rho : 0.0;
            for (std::size_t s = 0; s < x.size(); ++s) r[s] = x[s] + rng.complex_gaussian(noise);
            const auto app = app_decode_symbols(code, c, r, rho, bp_iters);
            double mse = 0.0;
            for (std::size_t s = 0; s < x.size(); ++s) mse += std::norm(x[s] - app.mean[s]);
            mse /= static_cast<double>(x.size());
            sum += mse;
            sum2 += mse * mse;
        }
        const double mean = sum / trials;
        const double var = trials > 1 ? std::max(0.0, (sum2 - trials * mean * mean) / (trials - 1)) : 0.0;
        out.push_back({rho, mean, std::sqrt(var / trials)});
    }
    return out;
}

} // namespace gmumimo
