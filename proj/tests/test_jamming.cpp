// SPDX-License-Identifier: Apache-2.0
//
// twinchan: software twin of an FPGA channel emulator and its sounding toolchain
// Copyright (C) 2026 The twinchan authors
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

#include "twinchan/jamming.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace twinchan;

TEST_CASE("log-distance gain")
{
    CHECK(log_distance_gain_db(1.0, 2.0) == 0.0);
    CHECK(log_distance_gain_db(10.0, 2.0) == doctest::Approx(-20.0));
    CHECK(log_distance_gain_db(0.2, 2.0) == 0.0);
}

TEST_CASE("OFDM burst and per-bin SINR")
{
    const auto s = ofdm_bpsk_burst(16, 3);
    CHECK(s.size() == 16 * 64);
    double p = 0.0;
    for (auto v : s)
        p += std::norm(v);
    CHECK(p / static_cast<double>(s.size()) == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<cplx> i(s.size());
    for (std::size_t n = 0; n < s.size(); ++n)
        i[n] = 0.1 * s[(n + 64) % s.size()]; // another symbol, same per-bin power
    CHECK(effective_sinr_db(s, i) == doctest::Approx(20.0).epsilon(1e-9));
    CHECK_THROWS_AS(effective_sinr_db(s, std::vector<cplx>(10)), std::invalid_argument);
}

TEST_CASE("jam geometry")
{
    JamConfig c;
    CHECK(jam_nodes(c).size() == 3);
    const auto paths = jam_ray_paths(c);
    CHECK(!paths.records.empty());
    c.mobile = true;
    const auto nodes = jam_nodes(c);
    CHECK(nodes[2].kind == NodeKind::Mobile);
}

TEST_CASE("jam config validation")
{
    JamConfig c;
    c.on_s = 50;
    CHECK_THROWS_AS(run_jam_demo(c), std::invalid_argument);
    c = {};
    c.off_s = 70;
    CHECK_THROWS_AS(run_jam_demo(c), std::invalid_argument);
}

TEST_CASE("static jam demo: drop only while the jammer is on, wideband hurts more")
{
    JamConfig c;
    c.total_s = 12;
    c.on_s = 4;
    c.off_s = 8;
    c.kind = JammerKind::Narrowband;
    const auto nb = run_jam_demo(c);
    c.kind = JammerKind::Wideband;
    const auto wb = run_jam_demo(c);
    REQUIRE(nb.sinr_db.size() == 12);
    for (std::size_t i = 0; i < 12; ++i)
    {
        const bool on = i >= 4 && i < 8;
        const double dn = nb.report.pre_mean - nb.sinr_db.values[i];
        const double dw = wb.report.pre_mean - wb.sinr_db.values[i];
        if (on)
        {
            CHECK(dn > 0.5);
            CHECK(dw > dn);
        }
        else
        {
            CHECK(std::abs(dn) < 0.5);
            CHECK(std::abs(dw) < 0.5);
        }
    }
    CHECK(wb.report.drop_db > nb.report.drop_db);

    // Same seed, same series.
    const auto again = run_jam_demo(c);
    CHECK(again.sinr_db.values == wb.sinr_db.values);
}

TEST_CASE("jammer on from the start uses the tail as baseline")
{
    JamConfig c;
    c.total_s = 6;
    c.on_s = 0;
    c.off_s = 3;
    const auto r = run_jam_demo(c);
    CHECK(r.report.drop_db > 1.0);
}
