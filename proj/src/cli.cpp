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

#include "gmumimo/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "gmumimo/capacity.hpp"
#include "gmumimo/config.hpp"
#include "gmumimo/error.hpp"
#include "gmumimo/harness.hpp"
#include "gmumimo/rate_allocation.hpp"
#include "gmumimo/state_evolution.hpp"

namespace gmumimo {

namespace fs = std::filesystem;

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCode::io, "sha256 failed");
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Outputs {
    fs::path dir;
    nlohmann::json files = nlohmann::json::array();

    void write(const std::string& name, const std::string& content) {
        const fs::path target = dir / name;
        const fs::path tmp = dir / (name + ".tmp");
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw Error(ErrorCode::io, "cannot write " + tmp.string());
            out << content;
            out.flush();
            if (!out) throw Error(ErrorCode::io, "write failed for " + tmp.string());
        }
        fs::rename(tmp, target);
        files.push_back({{"file", name}, {"sha256", sha256_hex(content)}});
    }
};

struct Options {
    std::string config;
    std::string out = "out";
    std::string snr_db;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    std::uint64_t trials = 0;
};

SimConfig effective_config(CLI::App& sub, const Options& o) {
    SimConfig cfg = load_config(o.config);
    if (!o.snr_db.empty()) {
        std::vector<double> snrs;
        std::stringstream ss(o.snr_db);
        std::string item;
        while (std::getline(ss, item, ','))
            for (double v : parse_snr_range(item)) snrs.push_back(v);
        cfg.snr_db = snrs;
    }
    if (sub.count("--seed")) cfg.seed = o.seed;
    if (sub.count("--workers")) cfg.workers = o.workers;
    if (sub.count("--trials")) cfg.trials = o.trials;
    cfg.validate();
    return cfg;
}

void cmd_chart(const SimConfig& cfg, Outputs& out) {
    const auto spectrum = cfg.channel.spectrum(0);
    const Constellation c = Constellation::by_name(cfg.constellation);
    std::ostringstream os;
    os << "snr_db,rho,v_ld,v_nld_S,v_nld_C_opt\n";
    for (double db : cfg.snr_db) {
        const auto chart = build_chart(spectrum, db_to_linear(db), c, to_string(cfg.channel.kind), cfg.chart_points);
        for (std::size_t i = 0; i < chart.rho_grid.size(); ++i)
            os << num(db) << ',' << num(chart.rho_grid[i]) << ',' << num(chart.ld_curve[i]) << ','
               << num(chart.nld_curve[i]) << ',' << num(chart.opt_curve[i]) << '\n';
    }
    out.write("chart.csv", os.str());
}

void cmd_capacity(const SimConfig& cfg, Outputs& out) {
    const auto spectrum = cfg.channel.spectrum(0);
    const Constellation c = Constellation::by_name(cfg.constellation);
    std::vector<double> snrs;
    for (double db : cfg.snr_db) snrs.push_back(db_to_linear(db));
    const auto reports = capacity_sweep(spectrum, c, snrs, cfg.capacity_tol);
    std::ostringstream os;
    os << "snr_db,c_bar_nats,c_bar_bits,c_sum,r_bar,rho_star,v_star,c_sum_closed_form,unique,dual_form_gap\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        os << num(cfg.snr_db[i]) << ',' << num(r.c_bar) << ',' << num(r.c_bar / std::log(2.0)) << ','
           << num(r.c_sum) << ',' << num(r.r_bar_oamp) << ',' << num(r.fixed_point.rho_star) << ','
           << num(r.fixed_point.v_star) << ',' << num(r.c_closed_form) << ',' << (r.unique ? 1 : 0) << ','
           << num(r.dual_form_gap) << '\n';
    }
    out.write("capacity.csv", os.str());
}

void cmd_fixed_point(const SimConfig& cfg, Outputs& out) {
    const auto spectrum = cfg.channel.spectrum(0);
    const Constellation c = Constellation::by_name(cfg.constellation);
    std::ostringstream os;
    os << "snr_db,candidate,rho_star,v_star,primary,unique\n";
    for (double db : cfg.snr_db) {
        const auto fp = find_fixed_point(spectrum, db_to_linear(db), c);
        for (std::size_t i = 0; i < fp.candidates.size(); ++i) {
            const auto& p = fp.candidates[i];
            const bool primary = p.rho_star == fp.primary.rho_star && p.v_star == fp.primary.v_star;
            os << num(db) << ',' << i + 1 << ',' << num(p.rho_star) << ',' << num(p.v_star) << ','
               << (primary ? 1 : 0) << ',' << (fp.unique() ? 1 : 0) << '\n';
        }
    }
    out.write("fixed_point.csv", os.str());
}

void cmd_allocate(const SimConfig& cfg, Outputs& out) {
    const auto spectrum = cfg.channel.spectrum(0);
    const Constellation c = Constellation::by_name(cfg.constellation);
    const double bits_per_symbol = c.is_gaussian() ? 0.0 : c.bits_per_symbol();
    const double per_group_antennas = static_cast<double>(cfg.channel.n) / static_cast<double>(cfg.layout.groups);
    std::ostringstream curves_os, rates_os;
    curves_os << "snr_db,rho";
    for (std::size_t g = 0; g < cfg.layout.groups; ++g) curves_os << ",v_" << g + 1;
    curves_os << ",average,omega_c_star\n";
    rates_os << "snr_db,group,gamma,rate_nats,rate_bits,group_total_bits,code_rate\n";
    for (double db : cfg.snr_db) {
        const double snr = db_to_linear(db);
        const auto alloc = make_allocation(spectrum, c, snr, cfg.gammas);
        const auto curves = group_mmse_curves(spectrum, c, snr, alloc, cfg.chart_points);
        for (std::size_t i = 0; i < curves.rho_grid.size(); ++i) {
            curves_os << num(db) << ',' << num(curves.rho_grid[i]);
            for (const auto& vg : curves.v) curves_os << ',' << num(vg[i]);
            curves_os << ',' << num(curves.average[i]) << ',' << num(curves.omega_c_star[i]) << '\n';
        }
        const auto rates = group_rates(spectrum, c, curves, cfg.channel.n, cfg.capacity_tol);
        for (std::size_t g = 0; g < rates.per_group.size(); ++g) {
            const double bits = rates.per_group[g] / std::log(2.0);
            rates_os << num(db) << ',' << g + 1 << ',' << num(cfg.gammas[g]) << ',' << num(rates.per_group[g]) << ','
                     << num(bits) << ',' << num(bits * per_group_antennas) << ','
                     << (bits_per_symbol > 0.0 ? num(bits / bits_per_symbol) : std::string()) << '\n';
        }
        rates_os << num(db) << ",sum,," << num(rates.sum) << ',' << num(rates.sum / std::log(2.0)) << ','
                 << num(rates.sum / std::log(2.0)) << ",\n";
        rates_os << num(db) << ",r_bar,," << num(rates.r_bar) << ',' << num(rates.r_bar / std::log(2.0)) << ",,\n";
    }
    out.write("allocation_curves.csv", curves_os.str());
    out.write("rates.csv", rates_os.str());
}

void cmd_ber(const SimConfig& cfg, Outputs& out, nlohmann::json& extra) {
    const auto records = run_ber(cfg, [](const BerRecord& r) {
        std::fprintf(stderr, "snr %.3f dB: frames %llu, frame errors %llu, BER %.3e (%.1f s)\n", r.snr_db,
                     static_cast<unsigned long long>(r.frames), static_cast<unsigned long long>(r.frame_errors),
                     r.total_ber(), r.wall_seconds);
    });
    std::ostringstream os;
    write_ber_csv(os, records);
    out.write("ber.csv", os.str());
    nlohmann::json walls = nlohmann::json::array();
    for (const auto& r : records) walls.push_back({{"snr_db", r.snr_db}, {"wall_seconds", r.wall_seconds}});
    extra["ber_wall_time"] = walls;
}

void cmd_threshold(const SimConfig& cfg, Outputs& out) {
    if (cfg.mode != Mode::coded) throw Error(ErrorCode::config, "threshold: config mode must be 'coded'");
    const auto codes = build_group_codes(cfg);
    const auto t = coded_se_threshold(cfg, codes);
    std::ostringstream curve_os, summary_os;
    write_transfer_csv(curve_os, t);
    summary_os << "group,n,k,rate,girth\n";
    for (std::size_t g = 0; g < codes.size(); ++g)
        summary_os << g + 1 << ',' << codes[g].n() << ',' << codes[g].k() << ',' << num(codes[g].rate()) << ','
                   << codes[g].girth() << '\n';
    summary_os << "threshold_snr_db," << num(t.snr_db) << ",,,\n";
    out.write("transfer.csv", curve_os.str());
    out.write("threshold.csv", summary_os.str());
}

void cmd_se_validate(SimConfig cfg, Outputs& out) {
    cfg.mode = Mode::genie;
    const auto reports = run_se_validation(cfg);
    std::ostringstream rows, summary;
    write_se_validation_csv(rows, reports);
    write_se_summary_csv(summary, reports);
    out.write("se_validation.csv", rows.str());
    out.write("se_summary.csv", summary.str());
}

} // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Detection, capacity and rate-allocation toolkit for coded multi-user MIMO"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    Options opt;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"chart", "LD / NLD transfer curves"},
        {"capacity", "constrained capacity and achievable rate sweep"},
        {"fixed-point", "SE fixed points"},
        {"allocate", "per-group MMSE curves and rate table"},
        {"ber", "Monte-Carlo bit error rates"},
        {"threshold", "measured code transfer curves and the coded SE threshold"},
        {"se-validate", "genie-mode detector against state evolution"},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "JSON configuration file")->required();
        sub->add_option("--out", opt.out, "output directory")->capture_default_str();
        sub->add_option("--snr-db", opt.snr_db, "SNR list override: a:step:b or comma-separated values");
        sub->add_option("--seed", opt.seed, "seed override");
        sub->add_option("--workers", opt.workers, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--trials", opt.trials, "frame budget override")->check(CLI::PositiveNumber);
        subs.push_back(sub);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    CLI::App* sub = nullptr;
    for (auto* s : subs)
        if (s->parsed()) sub = s;
    const std::string name = sub->get_name();

    SimConfig cfg;
    try {
        cfg = effective_config(*sub, opt);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        Outputs out;
        out.dir = opt.out;
        fs::create_directories(out.dir);
        nlohmann::json extra = nlohmann::json::object();
        if (name == "chart")
            cmd_chart(cfg, out);
        else if (name == "capacity")
            cmd_capacity(cfg, out);
        else if (name == "fixed-point")
            cmd_fixed_point(cfg, out);
        else if (name == "allocate")
            cmd_allocate(cfg, out);
        else if (name == "ber")
            cmd_ber(cfg, out, extra);
        else if (name == "threshold")
            cmd_threshold(cfg, out);
        else
            cmd_se_validate(cfg, out);

        const std::string canonical = cfg.canonical();
        nlohmann::json manifest = {
            {"command", name},
            {"config_path", fs::absolute(opt.config).string()},
            {"config_sha256", sha256_hex(canonical)},
            {"config", nlohmann::json::parse(canonical)},
            {"seed", cfg.seed},
            {"workers", cfg.workers},
            {"versions",
             {{"gmumimo", kVersion},
              {"compiler", __VERSION__},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
              {"boost", BOOST_LIB_VERSION},
              {"openssl", OPENSSL_VERSION_TEXT}}},
            {"outputs", out.files},
            {"finished_utc", utc_now()},
            {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()},
        };
        for (const auto& [k, v] : extra.items()) manifest[k] = v;
        out.write("manifest.json", manifest.dump(2) + "\n");
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::config ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

} // namespace gmumimo
