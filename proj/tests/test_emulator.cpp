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

#include "twinchan/dsp.hpp"
#include "twinchan/emulator.hpp"
#include "twinchan/experiments.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <stdexcept>

using namespace twinchan;

namespace
{
    std::vector<cplx> noise_vec(std::mt19937_64 &rng, std::size_t n)
    {
        std::normal_distribution<double> g;
        std::vector<cplx> v(n);
        for (auto &x : v)
            x = {g(rng), g(rng)};
        return v;
    }

    Node fixed(int id) { return {id, NodeKind::Static, {double(id), 0.0, 0.0}, 0.0, {}}; }

    // Three nodes, every link a random timeline of `frames` frames.
    std::shared_ptr<const Scenario> random_scenario(std::mt19937_64 &rng, int frames)
    {
        std::uniform_int_distribution<int> slot(0, 511);
        std::normal_distribution<double> g(0.0, 0.5);
        std::map<LinkId, CirTimeline> links;
        for (int a = 1; a <= 3; ++a)
            for (int b = 1; b <= 3; ++b)
                if (a != b)
                {
                    CirTimeline tl;
                    for (int f = 0; f < frames; ++f)
                    {
                        std::set<int> s;
                        while (s.size() < 3)
                            s.insert(slot(rng));
                        std::vector<Tap> taps;
                        for (int x : s)
                            taps.push_back({x, {g(rng), g(rng)}});
                        tl.frames.emplace_back(taps);
                        tl.propagation_delays.push_back(0.0);
                    }
                    links.emplace(LinkId{a, b}, tl);
                }
        return std::make_shared<const Scenario>(std::vector<Node>{fixed(1), fixed(2), fixed(3)}, RadioParams{}, 1.0,
                                                links, ScenarioMetadata{});
    }

    EmulationSession session_for(std::shared_ptr<const Scenario> sc, double rate, bool noise)
    {
        EmulationSession s;
        for (int id : sc->node_ids())
            s.active_nodes.insert(id);
        s.scenario = std::move(sc);
        s.sample_rate = rate;
        s.noise_enabled = noise;
        return s;
    }

    double in_band_fraction(const IqBlock &b, double half_band)
    {
        const auto X = dsp::fft(b.samples());
        const double n = static_cast<double>(X.size());
        double in = 0.0, all = 0.0;
        for (std::size_t k = 0; k < X.size(); ++k)
        {
            const double kk = static_cast<double>(k);
            const double f = (kk < n / 2 ? kk : kk - n) * b.sample_rate() / n;
            all += std::norm(X[k]);
            if (std::abs(f) <= half_band)
                in += std::norm(X[k]);
        }
        return in / all;
    }
} // namespace

TEST_CASE("FIR identity and scaling")
{
    std::mt19937_64 rng(1);
    const IqBlock x(noise_vec(rng, 1000), 1e6);
    const auto y = fir_apply(x, TapSet({{0, 1.0}}));
    REQUIRE(y.size() == x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(y[i] == x[i]);
    const auto h = fir_apply(x, TapSet({{0, 0.5}}));
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(h[i] == 0.5 * x[i]);
}

TEST_CASE("four-tap impulse response at 50 MS/s")
{
    std::vector<cplx> imp(8, cplx{});
    imp[0] = 1.0;
    const std::vector<double> gains{-3, -20, -15, -8};
    const TapSet taps({{0, db_to_amplitude(-3)}, {128, db_to_amplitude(-20)}, {200, db_to_amplitude(-15)},
                       {400, db_to_amplitude(-8)}});
    const auto y = fir_apply(IqBlock(imp, 50e6), taps);
    CHECK(y.size() == 8 + 200);
    const std::vector<std::size_t> at{0, 64, 100, 200};
    for (std::size_t i = 0; i < y.size(); ++i)
    {
        const auto it = std::find(at.begin(), at.end(), i);
        if (it == at.end())
            CHECK(y[i] == cplx{});
        else
            CHECK(std::abs(y[i]) == doctest::Approx(db_to_amplitude(gains[static_cast<std::size_t>(it - at.begin())])));
    }
}

TEST_CASE("slot that misses the sample grid warns")
{
    Diagnostics d;
    const auto delays = tap_sample_delays(TapSet({{0, 1.0}, {3, 1.0}}), 50e6, kSlotWidth, &d);
    CHECK(delays[1] == 2); // 30 ns at 20 ns per sample rounds to 2
    CHECK(d.warnings.size() == 1);
}

TEST_CASE("time-invariant timeline collapses to one FIR")
{
    std::mt19937_64 rng(2);
    CirTimeline tl;
    const TapSet t({{0, {0.3, 0.1}}, {77, {-0.2, 0.4}}, {511, {0.05, 0.0}}});
    tl.frames.assign(5, t);
    tl.propagation_delays.assign(5, 0.0);
    for (double rate : {1e6, 20e6, 50e6})
    {
        const std::size_t n = static_cast<std::size_t>(rate * 4.5e-3);
        const IqBlock x(noise_vec(rng, n), rate, 0.0);
        const auto a = emulate_link(x, tl), b = fir_apply(x, t);
        REQUIRE(a.size() == b.size());
        CHECK(std::equal(a.samples().begin(), a.samples().end(), b.samples().begin()));
    }
}

TEST_CASE("gain step leaves only the decaying tail")
{
    CirTimeline tl;
    tl.frames = {TapSet({{0, 1.0}, {256, 0.5}}), TapSet({{0, 0.0}, {256, 0.0}})};
    tl.propagation_delays = {0.0, 0.0};
    const double rate = 50e6;
    const std::vector<cplx> ones(static_cast<std::size_t>(2e-3 * rate), cplx{1.0, 0.0});
    const auto y = emulate_link(IqBlock(ones, rate), tl);
    const std::size_t edge = static_cast<std::size_t>(1e-3 * rate), tail = 128;
    for (std::size_t i = tail; i < edge; ++i)
        CHECK(y[i] == cplx{1.5, 0.0});
    for (std::size_t i = edge; i < edge + tail; ++i)
        CHECK(y[i] == cplx{0.5, 0.0});
    for (std::size_t i = edge + tail; i < y.size(); ++i)
        CHECK(y[i] == cplx{});
}

TEST_CASE("running past the timeline")
{
    CirTimeline tl;
    tl.frames = {TapSet({{0, 1.0}}), TapSet({{0, 2.0}})};
    tl.propagation_delays = {0.0, 0.0};
    const IqBlock x(std::vector<cplx>(3000, 1.0), 1e6);
    CHECK_THROWS_AS(emulate_link(x, tl), std::invalid_argument);
    const auto y = emulate_link(x, tl, true);
    CHECK(y[0] == cplx{1.0});
    CHECK(y[1500] == cplx{2.0});
    CHECK(y[2500] == cplx{1.0});
}

TEST_CASE("superimpose identity and sum")
{
    RadioParams radio;
    radio.base_loss_db = 0.0;
    auto sc = flat_scenario(3, radio, 0.01);
    auto s = session_for(sc, 1e6, false);
    std::mt19937_64 rng(3);
    const IqBlock x1(noise_vec(rng, 5000), 1e6), x2(noise_vec(rng, 5000), 1e6);
    const auto y = superimpose(3, {{1, x1}}, s);
    for (std::size_t i = 0; i < x1.size(); ++i)
        CHECK(y[i] == x1[i]);
    const auto y2 = superimpose(3, {{1, x1}, {2, x2}}, s);
    for (std::size_t i = 0; i < x1.size(); ++i)
        CHECK(y2[i] == x1[i] + x2[i]);
}

TEST_CASE("superimpose errors")
{
    auto sc = flat_scenario(3, RadioParams{}, 0.01);
    auto s = session_for(sc, 1e6, false);
    const IqBlock x(std::vector<cplx>(10, 1.0), 1e6);
    CHECK_THROWS_AS(superimpose(1, {{1, x}}, s), std::invalid_argument);
    CHECK_THROWS_AS(superimpose(9, {{1, x}}, s), std::invalid_argument);
    CHECK_THROWS_AS(superimpose(2, {{1, IqBlock(std::vector<cplx>(10, 1.0), 2e6)}}, s), std::invalid_argument);
    s.active_nodes.erase(1);
    CHECK_THROWS_AS(superimpose(2, {{1, x}}, s), std::invalid_argument);
}

TEST_CASE("linearity, superposition and noise determinism on random channels")
{
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 10; ++trial)
    {
        auto sc = random_scenario(rng, 4);
        auto s = session_for(sc, 20e6, false);
        s.loop_timeline = true;
        const std::size_t n = 30000 + rng() % 50000;
        const double t0 = static_cast<double>(rng() % 5000) / 20e6;
        const IqBlock x1(noise_vec(rng, n), 20e6, t0), x2(noise_vec(rng, n / 2), 20e6, t0);

        const double alpha = 0.1 + static_cast<double>(trial) * 3.7;
        std::vector<cplx> ax(x1.samples().begin(), x1.samples().end());
        for (auto &v : ax)
            v *= alpha;
        const auto y = superimpose(3, {{1, x1}}, s);
        const auto ya = superimpose(3, {{1, IqBlock(ax, 20e6, t0)}}, s);
        double peak = 0.0, err = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i)
        {
            peak = std::max(peak, std::abs(alpha * y[i]));
            err = std::max(err, std::abs(ya[i] - alpha * y[i]));
        }
        CHECK(err <= 1e-12 * peak);

        const auto y2 = superimpose(3, {{2, x2}}, s);
        const auto joint = superimpose(3, {{1, x1}, {2, x2}}, s);
        REQUIRE(joint.size() == std::max(y.size(), y2.size()));
        for (std::size_t i = 0; i < joint.size(); ++i)
            CHECK(joint[i] == (i < y.size() ? y[i] : cplx{}) + (i < y2.size() ? y2[i] : cplx{}));

        s.noise_enabled = true;
        s.rng_seed = 77;
        const auto n1 = superimpose(3, {{1, x1}}, s);
        s.threads = 3;
        const auto n2 = superimpose(3, {{1, x1}}, s);
        CHECK(std::equal(n1.samples().begin(), n1.samples().end(), n2.samples().begin()));
    }
}

TEST_CASE("noise is independent of how it is requested")
{
    const auto whole = gaussian_noise(5, 2, 1000, 200000, 1.0);
    const auto a = gaussian_noise(5, 2, 1000, 70000, 1.0);
    const auto b = gaussian_noise(5, 2, 71000, 130000, 1.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(whole[i] == a[i]);
    for (std::size_t i = 0; i < b.size(); ++i)
        CHECK(whole[70000 + i] == b[i]);
    double p = 0.0;
    for (auto v : whole)
        p += std::norm(v);
    CHECK(p / static_cast<double>(whole.size()) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(gaussian_noise(5, 3, 1000, 1, 1.0)[0] != whole[0]);
}

TEST_CASE("session noise variance")
{
    EmulationSession s;
    s.scenario = flat_scenario(2, RadioParams{}, 0.01);
    s.active_nodes = {1, 2};
    CHECK(s.noise_variance() == doctest::Approx(1e-10 * 255.0));
    Diagnostics d;
    s.sample_rate = 100e6;
    s.validate(&d);
    CHECK(d.warnings.size() == 1);
}

TEST_CASE("jammer spectra and determinism")
{
    const double rate = 20e6;
    const auto nb = gen_jammer(JammerKind::Narrowband, 0.0, 0.0, 0.05, rate, 1);
    CHECK(in_band_fraction(nb, 78e3) >= 0.99);
    CHECK(nb.mean_power() == doctest::Approx(1.0).epsilon(1e-12));
    const auto wb = gen_jammer(JammerKind::Wideband, 0.0, 10.0, 0.05, rate, 1);
    CHECK(in_band_fraction(wb, 5e6) >= 0.99);
    CHECK(wb.mean_power() == doctest::Approx(10.0).epsilon(1e-12));
    const auto again = gen_jammer(JammerKind::Narrowband, 0.0, 0.0, 0.05, rate, 1);
    CHECK(std::equal(nb.samples().begin(), nb.samples().end(), again.samples().begin()));
    CHECK_THROWS_AS(gen_jammer(JammerKind::Wideband, 30e6, 0.0, 0.01, rate, 1), std::invalid_argument);
    CHECK(jammer_kind_from_string("narrowband") == JammerKind::Narrowband);
    CHECK_THROWS_AS(jammer_kind_from_string("pulsed"), std::invalid_argument);
}

TEST_CASE("SINR")
{
    const std::vector<cplx> a(100, 1.0), b(100, cplx{0.0, 1.0}), c(100, std::sqrt(10.0));
    CHECK(measure_sinr(a, b) == doctest::Approx(0.0));
    CHECK(measure_sinr(c, a) == doctest::Approx(10.0));
    CHECK(std::isinf(measure_sinr(a, std::vector<cplx>(100, 0.0))));
    CHECK_THROWS_AS(measure_sinr(a, std::vector<cplx>(99, 1.0)), std::invalid_argument);
}

TEST_CASE("iq32 round trip")
{
    const auto dir = std::filesystem::temp_directory_path() / "twinchan_iq_test";
    std::filesystem::create_directories(dir);
    const IqBlock x({{0.5, -0.25}, {1.0, 2.0}, {-3.0, 0.125}}, 2e6, 0.5);
    write_iq32(dir / "x.iq32", x);
    const auto y = read_iq32(dir / "x.iq32");
    CHECK(y.size() == 3);
    CHECK(y.sample_rate() == 2e6);
    CHECK(y.t0() == 0.5);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(y[i] == x[i]);
    CHECK_THROWS_AS(read_iq32(dir / "missing.iq32"), std::invalid_argument);
    std::filesystem::remove_all(dir);
}
