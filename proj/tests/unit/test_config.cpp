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

#include "doctest.h"

#include <string>

#include "gmumimo/config.hpp"
#include "gmumimo/error.hpp"

using namespace gmumimo;

namespace {

ErrorCode code_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::invalid_argument;  // sentinel: no error raised
}

} // namespace

TEST_CASE("snr ranges") {
    const auto r = parse_snr_range("6:0.5:10");
    REQUIRE(r.size() == 9);
    CHECK(r.front() == 6.0);
    CHECK(r.back() == doctest::Approx(10.0));
    CHECK(parse_snr_range("3.5") == std::vector<double>{3.5});
    CHECK(parse_snr_range("0:0.1:1").size() == 11);
    CHECK_THROWS_AS(parse_snr_range("1:0:4"), Error);
    CHECK_THROWS_AS(parse_snr_range("4:1:1"), Error);
    CHECK_THROWS_AS(parse_snr_range("a:b"), Error);
}

TEST_CASE("minimal config and derived fields") {
    const auto cfg = parse_config(R"({"channel": {"n": 192, "spectrum": "conditioned", "kappa": 50},
                                      "beta": 1.5, "snr_db": "0:1:3"})");
    CHECK(cfg.channel.m == 128);
    CHECK(*cfg.beta == 1.5);
    CHECK(cfg.layout.users == 1);
    CHECK(cfg.layout.n() == 192);
    CHECK(cfg.snr_db.size() == 4);
    CHECK(cfg.gammas == std::vector<double>{1.0});
    CHECK(cfg.mode == Mode::uncoded);
    CHECK(cfg.target_frame_errors == 100);

    const auto coded = parse_config(R"({
        "channel": {"spectrum": "conditioned", "kappa": 50, "seed": 4},
        "beta": 1.5,
        "layout": {"users": 4, "antennas_per_user": 48, "groups": 2, "slots": 24},
        "codes": [{"kind": "regular", "n": 2304, "dv": 3, "dc": 8},
                  {"kind": "regular", "n": 2304, "dv": 4, "dc": 6, "seed": 2}],
        "mode": "coded", "snr_db": [10, 11], "workers": 8,
        "detector": {"variance": "residual"}})");
    CHECK(coded.channel.n == 192);
    CHECK(coded.channel.m == 128);
    CHECK(coded.gammas.size() == 2);
    CHECK(coded.detector.variance == VarianceEstimate::residual);
    CHECK(coded.codes[1].seed == 2);

    // Worker count never enters the canonical form.
    auto other = coded;
    other.workers = 1;
    CHECK(other.canonical() == coded.canonical());
    other.seed = 99;
    CHECK(other.canonical() != coded.canonical());
}

TEST_CASE("config errors are reported before any work") {
    CHECK(code_of("{") == ErrorCode::config);
    CHECK(code_of(R"({"channel": {"n": 4, "m": 4}, "snr_db": 1, "typo": 1})") == ErrorCode::config);
    CHECK(code_of(R"({"snr_db": 1})") == ErrorCode::config);
    CHECK(code_of(R"({"channel": {"n": 6, "m": 5}, "beta": 1.5, "snr_db": 1})") == ErrorCode::config);
    CHECK(code_of(R"({"channel": {"n": 6, "m": 6}, "layout": {"users": 3, "antennas_per_user": 2, "groups": 2},
                      "snr_db": 1})") == ErrorCode::config);
    CHECK(code_of(R"({"channel": {"n": 8, "m": 8}, "layout": {"users": 2, "antennas_per_user": 3},
                      "snr_db": 1})") == ErrorCode::config);
    CHECK(code_of(R"({"channel": {"n": 4, "m": 4}, "snr_db": 1, "mode": "coded",
                      "codes": [{"kind": "regular", "n": 12, "dv": 3, "dc": 6}]})") == ErrorCode::config);
    CHECK(code_of(R"({"channel": {"n": 4, "m": 4}, "snr_db": 1, "gammas": [1, 2]})") == ErrorCode::config);
    CHECK(code_of(R"({"channel": {"n": 4, "m": 4, "spectrum": "rayleigh"}, "snr_db": 1})") == ErrorCode::config);
    CHECK(code_of(R"({"channel": {"n": 4, "m": 4}, "snr_db": 1, "constellation": "8psk"})") == ErrorCode::config);
}

TEST_CASE("missing config file names the path") {
    try {
        load_config("/no/such/dir/cfg.json");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::io);
        CHECK(std::string(e.what()).find("/no/such/dir/cfg.json") != std::string::npos);
    }
}

TEST_CASE("comment lines are ignored and shipped configs load") {
    const auto cfg = parse_config("// header\n{\"channel\": {\"m\": 8, \"n\": 8}, // trailing\n \"snr_db\": 3}");
    CHECK(cfg.channel.n == 8);
    for (const char* name : {"qpsk_k50", "qpsk_iid", "allocate_n500", "coded_k50", "se_iid_2048"})
        CHECK_NOTHROW(load_config(std::string(GMUMIMO_SOURCE_DIR) + "/configs/" + name + ".json"));
}
