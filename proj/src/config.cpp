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

#include "gmumimo/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "gmumimo/constellation.hpp"
#include "gmumimo/error.hpp"

namespace gmumimo {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::config, "config: " + what); }

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) fail(where + " must be an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) fail("unknown key '" + k + "' in " + where);
}

template <class T>
T get(const json& j, const char* key, const std::string& where, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        fail("bad value for '" + std::string(key) + "' in " + where);
    }
}

std::vector<double> snr_list(const json& j) {
    if (j.is_string()) return parse_snr_range(j.get<std::string>());
    if (j.is_number()) return {j.get<double>()};
    if (j.is_array()) {
        std::vector<double> out;
        for (const auto& x : j) {
            if (!x.is_number()) fail("snr_db entries must be numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }
    fail("snr_db must be a number, a list or \"a:step:b\"");
}

EdgeProfile profile(const json& j, const std::string& where) {
    EdgeProfile p;
    if (!j.is_array()) fail(where + " must be a list of [degree, fraction] pairs");
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number())
            fail(where + " entries must be [degree, fraction]");
        p.emplace_back(e[0].get<int>(), e[1].get<double>());
    }
    return p;
}

json profile_json(const EdgeProfile& p) {
    json out = json::array();
    for (const auto& [d, f] : p) out.push_back({d, f});
    return out;
}

} // namespace

std::string to_string(Mode mode) {
    switch (mode) {
    case Mode::uncoded: return "uncoded";
    case Mode::coded: return "coded";
    case Mode::genie: return "genie";
    }
    return "uncoded";
}

std::vector<double> parse_snr_range(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            fail("cannot parse SNR range '" + text + "'");
        }
    }
    if (parts.size() == 1) return parts;
    if (parts.size() != 3) fail("SNR range must be 'a:step:b', got '" + text + "'");
    const double a = parts[0], step = parts[1], b = parts[2];
    if (!(step > 0.0) || b < a) fail("SNR range needs step > 0 and b >= a: '" + text + "'");
    std::vector<double> out;
    const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(a + static_cast<double>(i) * step);
    return out;
}

LdpcCode CodeSpec::build() const {
    if (kind == "uncoded") return LdpcCode::passthrough(n);
    if (kind == "regular") return build_regular(n, dv, dc, seed);
    if (kind == "irregular") return build_irregular(n, lambda, rho, seed);
    fail("unknown code kind '" + kind + "'");
}

SimConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        fail(std::string("malformed JSON: ") + e.what());
    }
    only_keys(root, "top level",
              {"channel", "beta", "constellation", "snr_db", "layout", "gammas", "codes", "mode", "trials",
               "target_frame_errors", "seed", "workers", "detector", "capacity", "chart", "threshold",
               "se_validation"});
    SimConfig cfg;

    if (!root.contains("channel")) fail("missing 'channel'");
    const json& ch = root.at("channel");
    only_keys(ch, "channel", {"m", "n", "spectrum", "kappa", "seed", "left_unitary", "reuse"});
    cfg.channel.m = get<std::size_t>(ch, "m", "channel", 0);
    cfg.channel.n = get<std::size_t>(ch, "n", "channel", 0);
    try {
        cfg.channel.kind = spectrum_kind_from_string(get<std::string>(ch, "spectrum", "channel", "iid"));
    } catch (const Error& e) {
        fail(e.what());
    }
    cfg.channel.kappa = get<double>(ch, "kappa", "channel", 1.0);
    cfg.channel.seed = get<std::uint64_t>(ch, "seed", "channel", 1);
    const auto left = get<std::string>(ch, "left_unitary", "channel", "haar");
    if (left == "haar")
        cfg.channel.left = LeftUnitary::haar;
    else if (left == "identity")
        cfg.channel.left = LeftUnitary::identity;
    else
        fail("left_unitary must be 'haar' or 'identity'");
    cfg.channel_reuse = get<std::uint64_t>(ch, "reuse", "channel", 1);

    if (root.contains("layout")) {
        const json& l = root.at("layout");
        only_keys(l, "layout", {"users", "antennas_per_user", "groups", "slots"});
        cfg.layout.users = get<std::size_t>(l, "users", "layout", 1);
        cfg.layout.antennas_per_user = get<std::size_t>(l, "antennas_per_user", "layout", 0);
        cfg.layout.groups = get<std::size_t>(l, "groups", "layout", 1);
        cfg.layout.slots = get<std::size_t>(l, "slots", "layout", 1);
        if (cfg.layout.antennas_per_user == 0 && cfg.layout.users > 0)
            cfg.layout.antennas_per_user = cfg.channel.n / cfg.layout.users;
        if (cfg.channel.n == 0) cfg.channel.n = cfg.layout.n();
    } else {
        cfg.layout = UserLayout{1, cfg.channel.n, 1, 1};
    }
    if (root.contains("beta")) {
        cfg.beta = get<double>(root, "beta", "top level", 0.0);
        if (!(*cfg.beta > 0.0)) fail("beta must be > 0");
        const auto m = static_cast<std::size_t>(std::llround(static_cast<double>(cfg.channel.n) / *cfg.beta));
        if (cfg.channel.m == 0)
            cfg.channel.m = m;
        else if (cfg.channel.m != m)
            fail("channel.m disagrees with round(n / beta)");
    }

    cfg.constellation = get<std::string>(root, "constellation", "top level", "qpsk");
    if (root.contains("snr_db")) cfg.snr_db = snr_list(root.at("snr_db"));
    cfg.gammas = get<std::vector<double>>(root, "gammas", "top level", {});
    if (cfg.gammas.empty()) cfg.gammas.assign(cfg.layout.groups, 1.0);

    if (root.contains("codes")) {
        const json& cs = root.at("codes");
        if (!cs.is_array()) fail("codes must be a list with one entry per group");
        for (std::size_t i = 0; i < cs.size(); ++i) {
            const std::string where = "codes[" + std::to_string(i) + "]";
            only_keys(cs[i], where, {"kind", "n", "dv", "dc", "lambda", "rho", "seed"});
            CodeSpec c;
            c.kind = get<std::string>(cs[i], "kind", where, "regular");
            c.n = get<std::size_t>(cs[i], "n", where, 0);
            c.dv = get<int>(cs[i], "dv", where, 0);
            c.dc = get<int>(cs[i], "dc", where, 0);
            if (cs[i].contains("lambda")) c.lambda = profile(cs[i].at("lambda"), where + ".lambda");
            if (cs[i].contains("rho")) c.rho = profile(cs[i].at("rho"), where + ".rho");
            c.seed = get<std::uint64_t>(cs[i], "seed", where, 1);
            cfg.codes.push_back(std::move(c));
        }
    }

    const auto mode = get<std::string>(root, "mode", "top level", "uncoded");
    if (mode == "uncoded")
        cfg.mode = Mode::uncoded;
    else if (mode == "coded")
        cfg.mode = Mode::coded;
    else if (mode == "genie")
        cfg.mode = Mode::genie;
    else
        fail("mode must be uncoded, coded or genie");
    cfg.trials = get<std::uint64_t>(root, "trials", "top level", 100);
    cfg.target_frame_errors = get<std::uint64_t>(root, "target_frame_errors", "top level", 100);
    cfg.seed = get<std::uint64_t>(root, "seed", "top level", 1);
    cfg.workers = get<unsigned>(root, "workers", "top level", 1);

    if (root.contains("detector")) {
        const json& d = root.at("detector");
        only_keys(d, "detector", {"max_iters", "tol", "bp_iters", "damping", "stop_when_decoded", "variance"});
        cfg.detector.max_iters = get<int>(d, "max_iters", "detector", cfg.detector.max_iters);
        cfg.detector.tol = get<double>(d, "tol", "detector", cfg.detector.tol);
        cfg.detector.bp_iters = get<int>(d, "bp_iters", "detector", cfg.detector.bp_iters);
        cfg.detector.damping = get<double>(d, "damping", "detector", cfg.detector.damping);
        cfg.detector.stop_when_decoded = get<bool>(d, "stop_when_decoded", "detector", cfg.detector.stop_when_decoded);
        const auto variance = get<std::string>(d, "variance", "detector", "posterior");
        if (variance == "posterior")
            cfg.detector.variance = VarianceEstimate::posterior;
        else if (variance == "residual")
            cfg.detector.variance = VarianceEstimate::residual;
        else
            fail("detector.variance must be 'posterior' or 'residual'");
    }
    if (root.contains("capacity")) {
        only_keys(root.at("capacity"), "capacity", {"tol"});
        cfg.capacity_tol = get<double>(root.at("capacity"), "tol", "capacity", cfg.capacity_tol);
    }
    if (root.contains("chart")) {
        only_keys(root.at("chart"), "chart", {"points"});
        cfg.chart_points = get<std::size_t>(root.at("chart"), "points", "chart", cfg.chart_points);
    }
    cfg.threshold.rho_db = parse_snr_range("-6:0.25:10");
    if (root.contains("threshold")) {
        const json& t = root.at("threshold");
        only_keys(t, "threshold", {"rho_db", "trials", "eps_gap", "decoded_floor", "snr_lo_db", "snr_hi_db"});
        if (t.contains("rho_db")) cfg.threshold.rho_db = snr_list(t.at("rho_db"));
        cfg.threshold.trials = get<int>(t, "trials", "threshold", cfg.threshold.trials);
        cfg.threshold.eps_gap = get<double>(t, "eps_gap", "threshold", cfg.threshold.eps_gap);
        cfg.threshold.decoded_floor = get<double>(t, "decoded_floor", "threshold", cfg.threshold.decoded_floor);
        cfg.threshold.snr_lo_db = get<double>(t, "snr_lo_db", "threshold", cfg.threshold.snr_lo_db);
        cfg.threshold.snr_hi_db = get<double>(t, "snr_hi_db", "threshold", cfg.threshold.snr_hi_db);
    }
    if (root.contains("se_validation")) {
        const json& s = root.at("se_validation");
        only_keys(s, "se_validation", {"seeds", "iters"});
        cfg.se_validation.seeds = get<std::size_t>(s, "seeds", "se_validation", cfg.se_validation.seeds);
        cfg.se_validation.iters = get<int>(s, "iters", "se_validation", cfg.se_validation.iters);
    }
    cfg.validate();
    return cfg;
}

void SimConfig::validate() const {
    if (channel.m == 0 || channel.n == 0) fail("channel needs m and n (or n and beta)");
    if (channel.kind == SpectrumKind::conditioned && !(channel.kappa >= 1.0)) fail("kappa must be >= 1");
    if (channel_reuse == 0) fail("channel.reuse must be >= 1");
    try {
        layout.validate();
        Constellation::by_name(constellation);
    } catch (const Error& e) {
        fail(e.what());
    }
    if (layout.n() != channel.n) fail("layout users * antennas_per_user must equal channel n");
    if (gammas.size() != layout.groups) fail("gammas needs one entry per group");
    for (double g : gammas)
        if (!(g > 0.0)) fail("gammas must be > 0");
    if (snr_db.empty()) fail("snr_db is empty");
    if (workers == 0) fail("workers must be >= 1");
    if (trials == 0) fail("trials must be >= 1");
    if (detector.max_iters < 1 || detector.bp_iters < 1) fail("detector iteration counts must be >= 1");
    if (!(detector.damping > 0.0 && detector.damping <= 1.0)) fail("detector.damping must be in (0, 1]");
    if (mode == Mode::coded) {
        if (codes.size() != layout.groups) fail("coded mode needs one code per group");
        const auto c = Constellation::by_name(constellation);
        if (c.is_gaussian()) fail("coded mode needs a discrete constellation");
        const std::size_t bits = layout.symbols_per_user() * static_cast<std::size_t>(c.bits_per_symbol());
        for (const auto& code : codes)
            if (code.n != bits)
                fail("code length " + std::to_string(code.n) + " must equal antennas_per_user * slots * bits/symbol = " +
                     std::to_string(bits));
    }
    if (threshold.trials < 1 || threshold.rho_db.empty()) fail("threshold needs trials >= 1 and a rho grid");
    if (se_validation.seeds == 0 || se_validation.iters < 1) fail("se_validation needs seeds >= 1 and iters >= 1");
}

std::string SimConfig::canonical() const {
    json j;
    j["channel"] = {{"m", channel.m},
                    {"n", channel.n},
                    {"spectrum", to_string(channel.kind)},
                    {"kappa", channel.kappa},
                    {"seed", channel.seed},
                    {"left_unitary", channel.left == LeftUnitary::haar ? "haar" : "identity"},
                    {"reuse", channel_reuse}};
    if (beta) j["beta"] = *beta;
    j["constellation"] = constellation;
    j["snr_db"] = snr_db;
    j["layout"] = {{"users", layout.users},
                   {"antennas_per_user", layout.antennas_per_user},
                   {"groups", layout.groups},
                   {"slots", layout.slots}};
    j["gammas"] = gammas;
    json codes_j = json::array();
    for (const auto& c : codes)
        codes_j.push_back({{"kind", c.kind},
                           {"n", c.n},
                           {"dv", c.dv},
                           {"dc", c.dc},
                           {"lambda", profile_json(c.lambda)},
                           {"rho", profile_json(c.rho)},
                           {"seed", c.seed}});
    j["codes"] = codes_j;
    j["mode"] = to_string(mode);
    j["trials"] = trials;
    j["target_frame_errors"] = target_frame_errors;
    j["seed"] = seed;
    j["detector"] = {{"max_iters", detector.max_iters},
                     {"tol", detector.tol},
                     {"bp_iters", detector.bp_iters},
                     {"damping", detector.damping},
                     {"stop_when_decoded", detector.stop_when_decoded},
                     {"variance", detector.variance == VarianceEstimate::residual ? "residual" : "posterior"}};
    j["capacity"] = {{"tol", capacity_tol}};
    j["chart"] = {{"points", chart_points}};
    j["threshold"] = {{"rho_db", threshold.rho_db},
                      {"trials", threshold.trials},
                      {"eps_gap", threshold.eps_gap},
                      {"decoded_floor", threshold.decoded_floor},
                      {"snr_lo_db", threshold.snr_lo_db},
                      {"snr_hi_db", threshold.snr_hi_db}};
    j["se_validation"] = {{"seeds", se_validation.seeds}, {"iters", se_validation.iters}};
    // Worker count is deliberately absent: it must not change any output.
    return j.dump();
}

SimConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot read config file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace gmumimo
