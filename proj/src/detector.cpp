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

#include "gmumimo/detector.hpp"

#include <algorithm>
#include <sstream>

#include "gmumimo/error.hpp"

namespace gmumimo {

void Trajectory::write_csv(std::ostream& os) const {
    os << "iter,rho,v,mse_r,mse_s\n";
    auto field = [&](double x) {
        if (std::isnan(x)) return std::string();
        std::ostringstream f;
        f.precision(17);
        f << x;
        return f.str();
    };
    for (const auto& r : records)
        os << r.iter << ',' << field(r.rho) << ',' << field(r.v) << ',' << field(r.mse_r) << ',' << field(r.mse_s)
           << '\n';
}

LinearDetector::LinearDetector(const ChannelMatrix& channel, const CMatrix& y, double snr)
    : channel_(channel), snr_(snr), lambda_(channel.spectrum().eigenvalues()) {
    if (static_cast<std::size_t>(y.rows()) != channel.m())
        throw Error(ErrorCode::invalid_dimension, "LD: y must have M rows");
    if (!(snr > 0.0)) throw Error(ErrorCode::invalid_argument, "LD: snr must be > 0");
    mf_ = channel.matched_filter_v_basis(y);
}

LinearDetector::Output LinearDetector::step(const CMatrix& s, double v_s) const {
    if (!(v_s > 0.0)) throw Error(ErrorCode::invalid_argument, "LD: v_s must be > 0");
    if (static_cast<std::size_t>(s.rows()) != channel_.n() || s.cols() != mf_.cols())
        throw Error(ErrorCode::invalid_dimension, "LD: s must be N x L");
    const auto& spectrum = channel_.spectrum();
    const double t = 1.0 / v_s;
    const double omega = omega_L(spectrum, snr_, t);
    const double comp = omega_L_complement(spectrum, snr_, t);  // 1 - Omega_L / v_s
    if (comp < 1e-14) throw Error(ErrorCode::degenerate_channel, "LD: c_L denominator vanishes");

    // f_lmmse = V^H diag(snr*lambda + 1/v_s)^{-1} (snr * mf + V s / v_s)
    CMatrix w = channel_.v_op().apply(s);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        const double d = snr_ * lambda_[static_cast<std::size_t>(i)] + t;
        w.row(i) = (snr_ * mf_.row(i) + t * w.row(i)) / d;
    }
    const CMatrix f = channel_.v_op().apply_adjoint(w);
    const double c_l = 1.0 / comp;
    Output out{c_l * f + (1.0 - c_l) * s, comp / omega};
    out.rho = std::min(out.rho, 1.0 / kVarianceFloor);
    return out;
}

LinearDetector::Output ld_step(const CMatrix& s, double v_s, const ChannelMatrix& channel, const CMatrix& y,
                               double snr) {
    return LinearDetector(channel, y, snr).step(s, v_s);
}

namespace {

NldOutput orthogonalize(CMatrix eta, const CMatrix& r, double rho, double omega) {
    const double den = 1.0 - rho * omega;  // (v_r - Omega) / v_r
    if (!(den > 0.0)) {
        std::ostringstream os;
        os << "NLD non-contracting: Omega = " << omega << " >= 1/rho = " << 1.0 / rho;
        throw Error(ErrorCode::non_contracting, os.str());
    }
    const double c_c = 1.0 / den;
    NldOutput out;
    out.omega = omega;
    out.s = c_c * eta + (1.0 - c_c) * r;
    out.v_s = std::max(omega / den, kVarianceFloor);
    out.posterior_mean = std::move(eta);
    return out;
}

} // namespace

NldOutput nld_uncoded_step(const CMatrix& r, double rho, const Constellation& c) {
    if (!(rho > 0.0)) throw Error(ErrorCode::invalid_argument, "NLD: rho must be > 0");
    CMatrix eta(r.rows(), r.cols());
    for (Eigen::Index j = 0; j < r.cols(); ++j)
        for (Eigen::Index i = 0; i < r.rows(); ++i) eta(i, j) = posterior_mean_var(c, r(i, j), rho).mean;
    return orthogonalize(std::move(eta), r, rho, omega_S(c, rho));
}

CodedNldOutput nld_coded_step(const CMatrix& r, double rho, const Constellation& c, const UserLayout& layout,
                              const std::vector<const LdpcCode*>& group_codes, int bp_iters) {
    if (!(rho > 0.0)) throw Error(ErrorCode::invalid_argument, "NLD: rho must be > 0");
    if (group_codes.size() != layout.groups) throw Error(ErrorCode::config, "NLD: one code per group required");
    CMatrix eta(r.rows(), r.cols());
    CodedNldOutput out;
    out.group_variance.assign(layout.groups, 0.0);
    for (std::size_t u = 0; u < layout.users; ++u) {
        const std::size_t g = layout.group_of_user(u);
        const auto stream = gather_symbols(layout, r, u);
        auto app = app_decode_symbols(*group_codes[g], c, stream, rho, bp_iters);
        for (double v : app.var)
            if (std::isnan(v)) throw Error(ErrorCode::numerical, "NLD: NaN posterior variance");
        scatter_symbols(layout, app.mean, u, eta);
        out.group_variance[g] += app.decode.avg_symbol_variance;
        out.decodes.push_back(std::move(app.decode));
    }
    double omega = 0.0;
    for (std::size_t g = 0; g < layout.groups; ++g) {
        auto& v = out.group_variance[g];
        v = group_codes[g]->is_passthrough() ? omega_S(c, rho) : v / static_cast<double>(layout.users_per_group());
        omega += v;
    }
    omega /= static_cast<double>(layout.groups);
    auto base = orthogonalize(std::move(eta), r, rho, omega);
    out.s = std::move(base.s);
    out.posterior_mean = std::move(base.posterior_mean);
    out.v_s = base.v_s;
    out.omega = base.omega;
    return out;
}

namespace {

double mse(const CMatrix& a, const CMatrix& b) {
    return (a - b).squaredNorm() / static_cast<double>(a.size());
}

double residual_variance(const CMatrix& y, const ChannelMatrix& channel, double snr, const CMatrix& s) {
    double trace = 0.0;
    for (double sigma : channel.spectrum().sigmas) trace += sigma * sigma;
    const double cols = static_cast<double>(y.cols());
    const double noise = static_cast<double>(channel.m()) / snr;
    return ((y - channel.apply(s)).squaredNorm() / cols - noise) / trace;
}

} // namespace

DetectionResult run_detector(const CMatrix& y, const ChannelMatrix& channel, double snr, const Constellation& c,
                             const UserLayout& layout, const std::vector<const LdpcCode*>& group_codes,
                             const DetectorOptions& opt, const CMatrix* x_true) {
    if (opt.max_iters < 1) throw Error(ErrorCode::invalid_argument, "detector: max_iters must be >= 1");
    if (!(opt.damping > 0.0 && opt.damping <= 1.0))
        throw Error(ErrorCode::invalid_argument, "detector: damping must be in (0, 1]");
    layout.validate();
    if (layout.n() != channel.n()) throw Error(ErrorCode::invalid_dimension, "detector: layout N differs from channel N");
    const bool coded = !group_codes.empty();
    const LinearDetector ld(channel, y, snr);

    DetectionResult res;
    res.trajectory.genie = x_true != nullptr;
    DetectorState st;
    st.s = CMatrix::Zero(static_cast<Eigen::Index>(channel.n()), y.cols());
    st.v_s = 1.0;
    std::vector<DecodeResult> last_decodes;
    CMatrix last_eta = st.s;

    for (int t = 1; t <= opt.max_iters; ++t) {
        IterationRecord rec;
        rec.iter = t;
        try {
            auto lo = ld.step(st.s, st.v_s);
            st.r = std::move(lo.r);
            st.rho = lo.rho;
            rec.rho = st.rho;
            if (x_true) rec.mse_r = mse(st.r, *x_true);

            NldOutput nld;
            bool all_decoded = false;
            if (coded) {
                auto cn = nld_coded_step(st.r, st.rho, c, layout, group_codes, opt.bp_iters);
                all_decoded = std::all_of(cn.decodes.begin(), cn.decodes.end(),
                                          [](const DecodeResult& d) { return d.converged; });
                last_decodes = std::move(cn.decodes);
                nld = std::move(cn);
            } else {
                nld = nld_uncoded_step(st.r, st.rho, c);
            }
            last_eta = nld.posterior_mean;
            const double v_prev = st.v_s;
            st.s = opt.damping * nld.s + (1.0 - opt.damping) * st.s;
            if (opt.variance == VarianceEstimate::residual)
                st.v_s = std::max(residual_variance(y, channel, snr, st.s), kVarianceFloor);
            else
                st.v_s = std::max(opt.damping * nld.v_s + (1.0 - opt.damping) * st.v_s, kVarianceFloor);
            st.iter = t;
            rec.v = st.v_s;
            if (x_true) rec.mse_s = mse(st.s, *x_true);
            res.trajectory.records.push_back(rec);
            res.iterations = t;
            if (std::abs(st.v_s - v_prev) < opt.tol) break;
            if (coded && opt.stop_when_decoded && all_decoded) break;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::non_contracting && e.code() != ErrorCode::degenerate_channel) throw;
            res.trajectory.halted = true;
            res.trajectory.halt_reason = e.what();
            break;
        }
    }
    if (st.r.size() == 0) throw Error(ErrorCode::degenerate_channel, "detector: no LD output produced");

    // Hard decisions.
    res.user_bits.resize(layout.users);
    if (coded) {
        if (last_decodes.size() != layout.users) {
            // Halted before the first NLD; decode once from the last LD output.
            last_decodes.clear();
            for (std::size_t u = 0; u < layout.users; ++u) {
                const auto stream = gather_symbols(layout, st.r, u);
                last_decodes.push_back(
                    app_decode_symbols(*group_codes[layout.group_of_user(u)], c, stream, st.rho, opt.bp_iters).decode);
            }
        }
        res.user_converged.resize(layout.users);
        for (std::size_t u = 0; u < layout.users; ++u) {
            res.user_bits[u] = last_decodes[u].hard;
            res.user_converged[u] = last_decodes[u].converged;
        }
    } else {
        for (std::size_t u = 0; u < layout.users; ++u) {
            const auto stream = gather_symbols(layout, st.r, u);
            const auto llr = demodulate_llr(c, stream, st.rho);
            res.user_bits[u].resize(llr.size());
            for (std::size_t i = 0; i < llr.size(); ++i) res.user_bits[u][i] = llr[i] < 0.0 ? 1 : 0;
        }
    }
    res.x_hat = last_eta;
    return res;
}

} // namespace gmumimo
