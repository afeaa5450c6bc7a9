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

#include "twinchan/experiments.hpp"
#include "twinchan/sounder.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

using namespace twinchan;

namespace
{
    Node fixed(int id) { return {id, NodeKind::Static, {double(id), 0.0, 0.0}, 0.0, {}}; }

    std::shared_ptr<const Scenario> two_node(const TapSet &taps, RadioParams radio = {})
    {
        CirTimeline tl;
        tl.frames = {taps};
        tl.propagation_delays = {0.0};
        return std::make_shared<const Scenario>(std::vector<Node>{fixed(1), fixed(2)}, radio, 1.0,
                                                std::map<LinkId, CirTimeline>{{{1, 2}, tl}, {{2, 1}, tl}},
                                                ScenarioMetadata{});
    }

    EmulationSession session_for(std::shared_ptr<const Scenario> sc, double rate, bool noise)
    {
        EmulationSession s;
        for (int id : sc->node_ids())
            s.active_nodes.insert(id);
        s.scenario = std::move(sc);
        s.sample_rate = rate;
        s.noise_enabled = noise;
        s.loop_timeline = true;
        return s;
    }

    std::vector<double> magnitude_of(const IqBlock &rx, const seq::CodeSequence &code, std::size_t spc = 1)
    {
        const auto h = estimate_cir(rx, code, spc);
        return cir_magnitude(h.h_i, h.h_q);
    }
} // namespace

TEST_CASE("BPSK modulation")
{
    const auto g = seq::gen_glfsr(8, 0, 1);
    CHECK(bpsk_modulate(g, 3, 1e6, 1e6).size() == 765);
    const seq::CodeSequence pm({1, -1}, seq::Family::Glfsr, seq::GlfsrParams{});
    const auto b = bpsk_modulate(pm, 1, 2e6, 1e6);
    REQUIRE(b.size() == 4);
    CHECK(b[0] == cplx{1, 0});
    CHECK(b[1] == cplx{1, 0});
    CHECK(b[2] == cplx{-1, 0});
    CHECK(b[3] == cplx{-1, 0});
    CHECK_THROWS_AS(bpsk_modulate(pm, 1, 1.5e6, 1e6), std::invalid_argument);
}

TEST_CASE("CIR estimate of simple channels")
{
    const auto code = seq::gen_glfsr(8, 0, 1);
    const auto tx = bpsk_modulate(code, 4, 1e6, 1e6);
    SUBCASE("identity channel has a unit peak at lag 0")
    {
        const auto m = magnitude_of(tx, code);
        CHECK(m.size() == tx.size());
        CHECK(m[0] == 1.0);
        CHECK(std::max_element(m.begin(), m.end()) - m.begin() == 0);
        CHECK(m[1] == doctest::Approx(1.0 / 255.0));
    }
    SUBCASE("half amplitude, ten samples late")
    {
        std::vector<cplx> y(tx.size(), cplx{});
        for (std::size_t i = 10; i < y.size(); ++i)
            y[i] = 0.5 * tx[i - 10];
        const auto m = magnitude_of(IqBlock(y, 1e6), code);
        CHECK(std::max_element(m.begin(), m.begin() + 255) - m.begin() == 10);
        CHECK(m[10] == doctest::Approx(0.5));
    }
    SUBCASE("four-tap profile at 50 MS/s")
    {
        const auto tx50 = bpsk_modulate(code, 4, 50e6, 50e6);
        const std::vector<double> gains{-3, -20, -15, -8};
        const TapSet taps({{0, db_to_amplitude(-3)}, {128, db_to_amplitude(-20)}, {200, db_to_amplitude(-15)},
                           {400, db_to_amplitude(-8)}});
        const auto y = fir_apply(tx50, taps);
        const auto m = magnitude_of(y, code);
        const std::vector<std::size_t> at{0, 64, 100, 200};
        for (std::size_t i = 0; i < 4; ++i)
        {
            const double rel = 20.0 * std::log10(m[255 + at[i]] / m[255]);
            CHECK(rel == doctest::Approx(gains[i] - gains[0]).epsilon(0.05));
        }
    }
}

TEST_CASE("magnitude and path gain")
{
    CHECK(cir_magnitude(std::vector<double>{3.0}, std::vector<double>{4.0})[0] == 5.0);
    CHECK(cir_magnitude(std::vector<double>{-2.0}, std::vector<double>{0.0})[0] == 2.0);
    CHECK(path_gain_db(1.0, RadioParams{}) == 0.0);
    RadioParams r;
    r.tx_power_db = 10.0;
    r.rx_gain_db = 5.0;
    CHECK(path_gain_db(1.0, r) == doctest::Approx(-15.0));
    CHECK(path_gain_db(0.0, r) == kPathGainFloorDb);
}

TEST_CASE("tap extraction")
{
    const auto code = seq::gen_glfsr(8, 0, 1);
    const auto tx = bpsk_modulate(code, 4, 50e6, 50e6);
    SUBCASE("identity channel gives one tap at 0")
    {
        const auto t = extract_taps(magnitude_of(tx, code), 50e6, 255, RadioParams{}, 12.0, 255);
        REQUIRE(t.size() == 1);
        CHECK(t[0].toa == 0.0);
        CHECK(t[0].gain_db == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("two equal taps 40 ns apart resolve two samples apart")
    {
        const auto y = fir_apply(tx, TapSet({{0, 0.5}, {4, 0.5}}));
        const auto t = extract_taps(magnitude_of(y, code), 50e6, 255, RadioParams{}, 12.0, 255);
        REQUIRE(t.size() == 2);
        // Equal taps: either may anchor, the other sits 2 samples away cyclically.
        const auto d = (t[1].index + 255 - t[0].index) % 255;
        CHECK((d == 2 || d == 253));
    }
    SUBCASE("flat noise has no tap")
    {
        const std::vector<double> flat(255, 1.0);
        CHECK_THROWS_AS(extract_taps(flat, 1e6, 255, RadioParams{}), NoSignalError);
    }
}

TEST_CASE("sounded base loss and its dependence on the transmit amplitude")
{
    auto sc = two_node(TapSet({{0, 1.0}}));
    SoundingConfig cfg;
    cfg.capture_duration = 0.2;
    const auto quiet = sound_link(session_for(sc, 1e6, false), 1, 2, cfg);
    CHECK(quiet.path_loss_db == doctest::Approx(57.55).epsilon(1e-12));
    CHECK(quiet.path_loss_sd_db == 0.0);
    REQUIRE(quiet.taps.size() == 1);
    CHECK(quiet.taps[0].sd_db == 0.0);

    const auto noisy = sound_link(session_for(sc, 1e6, true), 1, 2, cfg);
    CHECK(std::abs(noisy.path_loss_db - 57.55) < 0.05);
    CHECK(noisy.d_peak == doctest::Approx(255e-6));

    // Scaling the transmitted amplitude by alpha moves every |h| by alpha.
    for (double alpha_db : {-6.0, 3.5, 12.0})
    {
        SoundingConfig c2 = cfg;
        c2.tx_gain_db = alpha_db;
        const auto r = sound_link(session_for(sc, 1e6, false), 1, 2, c2);
        CHECK(quiet.path_loss_db - r.path_loss_db == doctest::Approx(alpha_db).epsilon(1e-9));
        const double ratio = r.mean_cir[0] / quiet.mean_cir[0];
        CHECK(ratio == doctest::Approx(db_to_amplitude(alpha_db)).epsilon(1e-12));
    }
}

TEST_CASE("links far below the noise floor")
{
    auto sc = two_node(TapSet({{0, db_to_amplitude(-60.0)}}));
    SoundingConfig cfg;
    cfg.capture_duration = 0.2;
    CHECK_THROWS_AS(sound_link(session_for(sc, 1e6, true), 1, 2, cfg), NoSignalError);
}

TEST_CASE("sounding is reproducible and chunking does not matter")
{
    auto sc = four_tap_scenario(TWINCHAN_DATA_DIR);
    SoundingConfig cfg;
    cfg.sample_rate = 50e6;
    cfg.capture_duration = 0.01;
    auto s = session_for(sc, 50e6, true);
    const auto a = sound_link(s, 1, 2, cfg);
    cfg.chunk_samples = 3000;
    s.threads = 2;
    const auto b = sound_link(s, 1, 2, cfg);
    CHECK(a.strongest_gain_db == b.strongest_gain_db);
    REQUIRE(a.taps.size() == b.taps.size());
    for (std::size_t i = 0; i < a.taps.size(); ++i)
        CHECK(a.taps[i].gain_db == b.taps[i].gain_db);
}

TEST_CASE("round-trip fidelity on random tap sets")
{
    // The m-sequence has off-peak correlation -1/N, so each tap estimate picks
    // up at most sum(|g_other|)/N from the other taps. Every tap must land
    // within that bias plus 0.25 dB, and within 0.5 dB when the bias is small.
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double rate = 50e6;
    int strict = 0;
    for (int trial = 0; trial < 12; ++trial)
    {
        std::set<int> slots{0};
        const int n = 1 + static_cast<int>(rng() % 4);
        while (static_cast<int>(slots.size()) < n)
        {
            const int s = 2 * static_cast<int>(rng() % 200); // even: lands on a sample
            bool ok = true;
            for (int o : slots)
                ok = ok && std::abs(o - s) >= 4; // >= 2 samples apart
            if (ok)
                slots.insert(s);
        }
        std::vector<Tap> taps;
        for (int s : slots)
            taps.push_back({s, std::polar(db_to_amplitude(-25.0 * u(rng)), 6.283 * u(rng))});
        auto sc = two_node(TapSet(taps));
        SoundingConfig cfg;
        cfg.sample_rate = rate;
        cfg.capture_duration = 0.01;
        const auto r = sound_link(session_for(sc, rate, true), 1, 2, cfg);
        REQUIRE(r.taps.size() == taps.size());

        std::size_t strongest = 0;
        for (std::size_t i = 0; i < taps.size(); ++i)
            if (std::abs(taps[i].gain) > std::abs(taps[strongest].gain))
                strongest = i;
        double sum_abs = 0.0;
        for (const auto &t : taps)
            sum_abs += std::abs(t.gain);
        // ToA is reported relative to the strongest path, modulo the code period.
        for (std::size_t i = 0; i < taps.size(); ++i)
        {
            const int off = ((taps[i].delay_slot - taps[strongest].delay_slot) / 2 + 255) % 255;
            const SoundedTap *hit = nullptr;
            for (const auto &t : r.taps)
                if (t.offset == static_cast<std::size_t>(off))
                    hit = &t;
            REQUIRE(hit != nullptr);
            const double g = std::abs(taps[i].gain);
            const double bias = -20.0 * std::log10(1.0 - (sum_abs - g) / (255.0 * g));
            const double err = hit->gain_db + 57.55 - amplitude_to_db(g);
            CHECK(hit->toa == doctest::Approx(off / rate));
            CHECK(std::abs(err) <= bias + 0.25);
            if (bias <= 0.25)
            {
                CHECK(std::abs(err) <= 0.5);
                ++strict;
            }
        }
    }
    CHECK(strict > 0);
}

TEST_CASE("loss matrix")
{
    auto sc = flat_scenario(3, RadioParams{}, 0.001);
    SoundingConfig cfg;
    cfg.capture_duration = 0.1;
    const auto m = sound_matrix(session_for(sc, 1e6, true), cfg, 2);
    CHECK(m.detected() == 6);
    CHECK(std::abs(m.mean_loss() - 57.55) < 0.1);
    CHECK(std::isnan(m.loss_db[0][0]));
    std::ostringstream csv;
    write_loss_matrix_csv(csv, m);
    CHECK(csv.str().rfind("tx\\rx,1,2,3\n1,,", 0) == 0);

    auto weak = flat_scenario(2, RadioParams{}, 0.001, -70.0);
    const auto w = sound_matrix(session_for(weak, 1e6, true), cfg, 1);
    CHECK(w.detected() == 0);
    CHECK(w.no_signal[0][1]);
    std::ostringstream wcsv;
    write_loss_matrix_csv(wcsv, w);
    CHECK(wcsv.str().find("no_signal") != std::string::npos);
}

TEST_CASE("configuration errors")
{
    auto sc = two_node(TapSet({{0, 1.0}}));
    SoundingConfig cfg;
    cfg.capture_duration = 0.0005; // fewer than three periods
    CHECK_THROWS_AS(sound_link(session_for(sc, 1e6, true), 1, 2, cfg), std::invalid_argument);
    cfg.capture_duration = 0.1;
    CHECK_THROWS_AS(sound_link(session_for(sc, 2e6, true), 1, 2, cfg), std::invalid_argument);
    CHECK_THROWS_AS(sound_link(session_for(sc, 1e6, true), 1, 1, cfg), std::invalid_argument);
}
