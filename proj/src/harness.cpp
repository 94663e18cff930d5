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

#include "gmumimo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "gmumimo/channel.hpp"
#include "gmumimo/detector.hpp"
#include "gmumimo/error.hpp"
#include "gmumimo/multiuser.hpp"
#include "gmumimo/random.hpp"
#include "gmumimo/state_evolution.hpp"

namespace gmumimo {

namespace {

constexpr std::uint64_t kDataTag = 0x44415441;
constexpr std::uint64_t kNoiseTag = 0x4e4f4953;
constexpr std::uint64_t kGenieTag = 0x47454e49;
constexpr std::uint64_t kTransferTag = 0x54485245;
constexpr std::uint64_t kChunk = 32;

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}


} // namespace

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
    const auto threads = static_cast<std::size_t>(std::max(1u, workers));
    if (threads == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(threads, count); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

double BerRecord::ber(std::size_t g) const {
    return bits[g] == 0 ? 0.0 : static_cast<double>(bit_errors[g]) / static_cast<double>(bits[g]);
}

std::uint64_t BerRecord::total_bit_errors() const {
    std::uint64_t s = 0;
    for (auto e : bit_errors) s += e;
    return s;
}

std::uint64_t BerRecord::total_bits() const {
    std::uint64_t s = 0;
    for (auto b : bits) s += b;
    return s;
}

double BerRecord::total_ber() const {
    const auto b = total_bits();
    return b == 0 ? 0.0 : static_cast<double>(total_bit_errors()) / static_cast<double>(b);
}

std::vector<LdpcCode> build_group_codes(const SimConfig& cfg) {
    std::vector<LdpcCode> codes;
    if (cfg.mode != Mode::coded) return codes;
    for (const auto& spec : cfg.codes) codes.push_back(spec.build());
    return codes;
}

FrameOutcome simulate_frame(const SimConfig& cfg, const Constellation& c, const std::vector<LdpcCode>& codes,
                            std::size_t snr_index, std::uint64_t frame) {
    const UserLayout& layout = cfg.layout;
    const bool coded = !codes.empty();
    const std::size_t bps = static_cast<std::size_t>(c.bits_per_symbol());
    const std::size_t stream_bits = layout.symbols_per_user() * bps;
    const double snr = db_to_linear(cfg.snr_db.at(snr_index));

    Rng data_rng(cfg.seed, {kDataTag, frame});
    std::vector<Bits> payload(layout.users);
    std::vector<std::vector<cplx>> streams(layout.users);
    for (std::size_t u = 0; u < layout.users; ++u) {
        const std::size_t g = layout.group_of_user(u);
        const std::size_t k = coded ? codes[g].k() : stream_bits;
        payload[u].resize(k);
        for (auto& b : payload[u]) b = data_rng.bit();
        const Bits word = coded ? codes[g].encode(payload[u]) : payload[u];
        streams[u] = modulate(c, word);
    }
    const CMatrix x = place_symbols(layout, streams);

    const ChannelMatrix channel = cfg.channel.realize(frame / cfg.channel_reuse);
    Rng noise_rng(cfg.seed, {kNoiseTag, frame});
    CMatrix noise(static_cast<Eigen::Index>(channel.m()), x.cols());
    for (Eigen::Index j = 0; j < noise.cols(); ++j)
        for (Eigen::Index i = 0; i < noise.rows(); ++i) noise(i, j) = noise_rng.complex_gaussian();
    const CMatrix y = channel.apply(x) + noise / std::sqrt(snr);

    std::vector<const LdpcCode*> group_codes;
    for (const auto& code : codes) group_codes.push_back(&code);
    const auto det = run_detector(y, channel, snr, c, layout, group_codes, cfg.detector,
                                  cfg.mode == Mode::genie ? &x : nullptr);

    FrameOutcome out;
    out.bit_errors.assign(layout.groups, 0);
    out.bits.assign(layout.groups, 0);
    out.group_error.assign(layout.groups, false);
    out.iterations = det.iterations;
    for (std::size_t u = 0; u < layout.users; ++u) {
        const std::size_t g = layout.group_of_user(u);
        const Bits decided = coded ? codes[g].extract_info(det.user_bits[u]) : det.user_bits[u];
        std::uint64_t errs = 0;
        for (std::size_t i = 0; i < payload[u].size(); ++i) errs += decided[i] != payload[u][i];
        out.bit_errors[g] += errs;
        out.bits[g] += payload[u].size();
        if (errs > 0) out.group_error[g] = true;
    }
    return out;
}

std::vector<BerRecord> run_ber(const SimConfig& cfg, const std::function<void(const BerRecord&)>& on_point) {
    cfg.validate();
    const Constellation c = Constellation::by_name(cfg.constellation);
    if (c.is_gaussian()) throw Error(ErrorCode::config, "ber: needs a discrete constellation");
    const std::vector<LdpcCode> codes = build_group_codes(cfg);
    const std::size_t groups = cfg.layout.groups;

    std::vector<BerRecord> records;
    for (std::size_t si = 0; si < cfg.snr_db.size(); ++si) {
        const auto start = std::chrono::steady_clock::now();
        BerRecord rec;
        rec.snr_db = cfg.snr_db[si];
        rec.bit_errors.assign(groups, 0);
        rec.bits.assign(groups, 0);
        rec.group_frame_errors.assign(groups, 0);
        std::uint64_t iterations = 0;
        bool done = false;
        for (std::uint64_t base = 0; base < cfg.trials && !done; base += kChunk) {
            const std::uint64_t count = std::min<std::uint64_t>(kChunk, cfg.trials - base);
            std::vector<FrameOutcome> chunk(count);
            parallel_for(count, cfg.workers,
                         [&](std::size_t i) { chunk[i] = simulate_frame(cfg, c, codes, si, base + i); });
            for (const auto& f : chunk) {
                bool any = false;
                for (std::size_t g = 0; g < groups; ++g) {
                    rec.bit_errors[g] += f.bit_errors[g];
                    rec.bits[g] += f.bits[g];
                    if (f.group_error[g]) {
                        ++rec.group_frame_errors[g];
                        any = true;
                    }
                }
                ++rec.frames;
                if (any) ++rec.frame_errors;
                iterations += static_cast<std::uint64_t>(f.iterations);
                if (rec.frame_errors >= cfg.target_frame_errors) {
                    done = true;
                    break;
                }
            }
        }
        rec.mean_iterations = static_cast<double>(iterations) / static_cast<double>(rec.frames);
        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (on_point) on_point(rec);
        records.push_back(std::move(rec));
    }
    return records;
}

void write_ber_csv(std::ostream& os, const std::vector<BerRecord>& records) {
    os << "snr_db,group,bits,bit_errors,ber,frames,frame_errors,mean_iterations\n";
    for (const auto& r : records) {
        for (std::size_t g = 0; g < r.bits.size(); ++g)
            os << num(r.snr_db) << ',' << g + 1 << ',' << r.bits[g] << ',' << r.bit_errors[g] << ',' << num(r.ber(g))
               << ',' << r.frames << ',' << r.group_frame_errors[g] << ',' << num(r.mean_iterations) << '\n';
        os << num(r.snr_db) << ",all," << r.total_bits() << ',' << r.total_bit_errors() << ',' << num(r.total_ber())
           << ',' << r.frames << ',' << r.frame_errors << ',' << num(r.mean_iterations) << '\n';
    }
}

std::vector<SeValidationReport> run_se_validation(const SimConfig& cfg) {
    cfg.validate();
    const Constellation c = Constellation::by_name(cfg.constellation);
    const int iters = cfg.se_validation.iters;
    const std::size_t seeds = cfg.se_validation.seeds;
    DetectorOptions opt = cfg.detector;
    opt.max_iters = iters;
    opt.tol = -1.0;  // run every iteration

    struct SeedResult {
        std::vector<IterationRecord> emp;
        std::vector<SeStep> se;
        double v_star = 0.0;
    };

    std::vector<SeValidationReport> reports;
    for (std::size_t si = 0; si < cfg.snr_db.size(); ++si) {
        const double snr = db_to_linear(cfg.snr_db[si]);
        std::vector<SeedResult> per_seed(seeds);
        parallel_for(seeds, cfg.workers, [&](std::size_t s) {
            const ChannelMatrix channel = cfg.channel.realize(s);
            Rng rng(cfg.seed, {kGenieTag, si, s});
            const std::size_t bits = cfg.layout.symbols_per_user() * static_cast<std::size_t>(c.bits_per_symbol());
            std::vector<std::vector<cplx>> streams(cfg.layout.users);
            for (auto& stream : streams) {
                if (c.is_gaussian()) {
                    stream.resize(cfg.layout.symbols_per_user());
                    for (auto& z : stream) z = rng.complex_gaussian();
                } else {
                    Bits b(bits);
                    for (auto& x : b) x = rng.bit();
                    stream = modulate(c, b);
                }
            }
            const CMatrix x = place_symbols(cfg.layout, streams);
            CMatrix y = channel.apply(x);
            for (Eigen::Index j = 0; j < y.cols(); ++j)
                for (Eigen::Index i = 0; i < y.rows(); ++i) y(i, j) += rng.complex_gaussian(1.0 / snr);
            const auto det = run_detector(y, channel, snr, c, cfg.layout, {}, opt, &x);
            per_seed[s].emp = det.trajectory.records;
            per_seed[s].se = se_trajectory(channel.spectrum(), snr, c, iters);
            per_seed[s].v_star = find_fixed_point(channel.spectrum(), snr, c).primary.v_star;
        });

        SeValidationReport rep;
        rep.snr_db = cfg.snr_db[si];
        rep.seeds = seeds;
        for (int t = 0; t < iters; ++t) {
            SeValidationRow row;
            row.iter = t + 1;
            std::size_t n = 0;
            for (const auto& r : per_seed) {
                if (static_cast<std::size_t>(t) >= r.emp.size() || static_cast<std::size_t>(t) >= r.se.size()) continue;
                row.mse_r += r.emp[static_cast<std::size_t>(t)].mse_r;
                row.mse_s += r.emp[static_cast<std::size_t>(t)].mse_s;
                row.se_mse_r += 1.0 / r.se[static_cast<std::size_t>(t)].rho;
                row.se_v += r.se[static_cast<std::size_t>(t)].v;
                ++n;
            }
            if (n == 0) break;
            const double dn = static_cast<double>(n);
            row.mse_r /= dn;
            row.mse_s /= dn;
            row.se_mse_r /= dn;
            row.se_v /= dn;
            row.gap_r = std::abs(row.mse_r - row.se_mse_r) / row.se_mse_r;
            row.gap_s = std::abs(row.mse_s - row.se_v) / row.se_v;
            rep.max_gap = std::max({rep.max_gap, row.gap_r, row.gap_s});
            rep.rows.push_back(row);
        }
        for (const auto& r : per_seed) rep.v_star += r.v_star;
        rep.v_star /= static_cast<double>(seeds);
        if (!rep.rows.empty()) {
            rep.terminal_mse = rep.rows.back().mse_s;
            rep.terminal_gap = std::abs(rep.terminal_mse - rep.v_star) / rep.v_star;
        }
        reports.push_back(std::move(rep));
    }
    return reports;
}

void write_se_validation_csv(std::ostream& os, const std::vector<SeValidationReport>& reports) {
    os << "snr_db,iter,mse_r,se_mse_r,gap_r,mse_s,se_v,gap_s\n";
    for (const auto& rep : reports)
        for (const auto& r : rep.rows)
            os << num(rep.snr_db) << ',' << r.iter << ',' << num(r.mse_r) << ',' << num(r.se_mse_r) << ','
               << num(r.gap_r) << ',' << num(r.mse_s) << ',' << num(r.se_v) << ',' << num(r.gap_s) << '\n';
}

void write_se_summary_csv(std::ostream& os, const std::vector<SeValidationReport>& reports) {
    os << "snr_db,seeds,v_star,terminal_mse,terminal_gap,max_gap\n";
    for (const auto& rep : reports)
        os << num(rep.snr_db) << ',' << rep.seeds << ',' << num(rep.v_star) << ',' << num(rep.terminal_mse) << ','
           << num(rep.terminal_gap) << ',' << num(rep.max_gap) << '\n';
}

TransferCurve::TransferCurve(const Constellation& c, std::vector<TransferPoint> points)
    : c_(c), points_(std::move(points)) {
    std::sort(points_.begin(), points_.end(), [](const auto& a, const auto& b) { return a.rho < b.rho; });
    points_.erase(std::remove_if(points_.begin(), points_.end(), [](const auto& p) { return !(p.rho > 0.0); }),
                  points_.end());
    if (points_.empty()) throw Error(ErrorCode::invalid_argument, "transfer curve: no points with rho > 0");
    double running = std::numeric_limits<double>::infinity();
    for (const auto& p : points_) {
        running = std::min(running, p.mse);
        log_rho_.push_back(std::log(p.rho));
        log_mse_.push_back(std::log(std::max(running, 1e-300)));
    }
}

double TransferCurve::operator()(double rho) const {
    if (!(rho > 0.0)) return 1.0;
    const double lr = std::log(rho);
    if (lr <= log_rho_.front()) return std::max(omega_S(c_, rho), std::exp(log_mse_.front()));
    if (lr >= log_rho_.back()) return std::exp(log_mse_.back());
    const auto hi = static_cast<std::size_t>(std::upper_bound(log_rho_.begin(), log_rho_.end(), lr) - log_rho_.begin());
    const std::size_t lo = hi - 1;
    const double w = (lr - log_rho_[lo]) / (log_rho_[hi] - log_rho_[lo]);
    return std::exp((1.0 - w) * log_mse_[lo] + w * log_mse_[hi]);
}

CodedThreshold coded_se_threshold(const SimConfig& cfg, const std::vector<LdpcCode>& codes) {
    if (codes.empty()) throw Error(ErrorCode::config, "threshold: needs coded mode with one code per group");
    const Constellation c = Constellation::by_name(cfg.constellation);
    std::vector<double> rho_grid;
    for (double db : cfg.threshold.rho_db) rho_grid.push_back(db_to_linear(db));

    CodedThreshold out;
    out.group_points.resize(codes.size());
    parallel_for(codes.size(), cfg.workers, [&](std::size_t g) {
        out.group_points[g] = measure_code_transfer(codes[g], c, rho_grid, cfg.threshold.trials,
                                                    cfg.seed ^ (kTransferTag + g), cfg.detector.bp_iters);
    });
    for (std::size_t i = 0; i < rho_grid.size(); ++i) {
        TransferPoint p{rho_grid[i], 0.0, 0.0};
        double var = 0.0;
        for (const auto& gp : out.group_points) {
            p.mse += gp[i].mse;
            var += gp[i].std_err * gp[i].std_err;
        }
        const double gcount = static_cast<double>(codes.size());
        p.mse /= gcount;
        p.std_err = std::sqrt(var) / gcount;
        out.average.push_back(p);
    }
    const TransferCurve curve(c, out.average);
    ThresholdOptions opt;
    opt.eps_gap = cfg.threshold.eps_gap;
    opt.decoded_floor = cfg.threshold.decoded_floor;
    out.snr = se_threshold(cfg.channel.spectrum(0), db_to_linear(cfg.threshold.snr_lo_db),
                           db_to_linear(cfg.threshold.snr_hi_db), [&](double rho) { return curve(rho); }, opt);
    out.snr_db = std::isfinite(out.snr) ? linear_to_db(out.snr) : std::numeric_limits<double>::infinity();
    return out;
}

void write_transfer_csv(std::ostream& os, const CodedThreshold& t) {
    os << "rho_db,rho";
    for (std::size_t g = 0; g < t.group_points.size(); ++g) os << ",mse_" << g + 1 << ",std_err_" << g + 1;
    os << ",mse_average\n";
    for (std::size_t i = 0; i < t.average.size(); ++i) {
        os << num(linear_to_db(t.average[i].rho)) << ',' << num(t.average[i].rho);
        for (const auto& gp : t.group_points) os << ',' << num(gp[i].mse) << ',' << num(gp[i].std_err);
        os << ',' << num(t.average[i].mse) << '\n';
    }
}

} // namespace gmumimo
