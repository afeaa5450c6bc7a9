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

#include "twinchan/sequences.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <set>

using namespace twinchan;
using namespace twinchan::seq;

namespace
{
    // 0 -> +1, 1 -> -1, MSB first.
    std::vector<int> chips_from_hex(const std::string &hex)
    {
        std::vector<int> out;
        for (char c : hex)
        {
            const int v = std::stoi(std::string(1, c), nullptr, 16);
            for (int b = 3; b >= 0; --b)
                out.push_back(((v >> b) & 1) ? -1 : +1);
        }
        return out;
    }

    std::vector<long long> brute_periodic(std::span<const int> a, std::span<const int> b)
    {
        std::vector<long long> r(a.size());
        for (std::size_t k = 0; k < a.size(); ++k)
            for (std::size_t n = 0; n < a.size(); ++n)
                r[k] += a[n] * b[(n + k) % a.size()];
        return r;
    }
} // namespace

TEST_CASE("GLFSR degree 8, mask 0, seed 1")
{
    const auto s = gen_glfsr(8, 0, 1);
    REQUIRE(s.size() == 255);
    // First 32 output bits and weight from an independent bit-level simulation.
    const std::string head = "10110001111010000111111110010000";
    for (std::size_t i = 0; i < head.size(); ++i)
        CHECK(s[i] == (head[i] == '1' ? -1 : +1));
    CHECK(std::count(s.chips().begin(), s.chips().end(), -1) == 128);
    CHECK(s.describe() == "glfsr:8:0:1");
}

TEST_CASE("GLFSR degree 2 enumerated by hand")
{
    // state 01 -> out 1, state 11 -> out 1, state 10 -> out 0
    const auto s = gen_glfsr(2, 0, 1);
    CHECK(std::vector<int>(s.chips().begin(), s.chips().end()) == std::vector<int>{-1, -1, +1});
}

TEST_CASE("GLFSR rejects the all-zero state and bad degrees")
{
    CHECK_THROWS_AS(gen_glfsr(8, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(gen_glfsr(1, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(gen_glfsr(33, 0, 1), std::invalid_argument);
}

TEST_CASE("m-sequence period and balance for every degree and several seeds")
{
    for (int d = 2; d <= 14; ++d)
        for (std::uint64_t seed : {1ull, 3ull, (1ull << d) - 1})
        {
            const auto s = gen_glfsr(d, 0, seed);
            CHECK(s.size() == (std::size_t{1} << d) - 1);
            const long sum = std::accumulate(s.chips().begin(), s.chips().end(), 0L);
            CHECK(std::abs(sum) == 1);
            const auto acf = periodic_autocorrelation(s);
            CHECK(acf[0] == static_cast<std::int64_t>(s.size()));
            for (std::size_t k = 1; k < acf.size(); ++k)
                CHECK(acf[k] == -1);
        }
}

TEST_CASE("GLFSR output mask keeps the m-sequence property")
{
    const auto s = gen_glfsr(8, 0x5a, 1);
    const auto acf = periodic_autocorrelation(s);
    for (std::size_t k = 1; k < acf.size(); ++k)
        CHECK(acf[k] == -1);
}

TEST_CASE("Gold code from the degree-6 pair")
{
    const auto g = gen_gold(0x43, 0x67, 0);
    CHECK(g.size() == 63);
    CHECK_THROWS_AS(gen_gold(0x43, 0x43, 0), std::invalid_argument);
}

TEST_CASE("degree-5 preferred pair is three-valued by brute force")
{
    const auto a = m_sequence_bits(0x25), b = m_sequence_bits(0x3d);
    std::vector<int> ca, cb;
    for (int x : a)
        ca.push_back(bit_to_chip(x));
    for (int x : b)
        cb.push_back(bit_to_chip(x));
    const auto r = brute_periodic(ca, cb);
    std::set<long long> values(r.begin(), r.end());
    for (long long v : values)
        CHECK((v == -1 || v == -9 || v == 7));
    const auto lib = periodic_cross_correlation(ca, cb);
    for (std::size_t k = 0; k < r.size(); ++k)
        CHECK(lib[k] == r[k]);
}

TEST_CASE("Gold family off-peak cross-correlation is three-valued")
{
    for (int shift : {0, 5, 17})
    {
        const auto x = gen_gold(0x43, 0x67, shift), y = gen_gold(0x43, 0x67, shift + 1);
        const auto r = periodic_cross_correlation(x.chips(), y.chips());
        std::set<std::int64_t> values(r.begin(), r.end());
        CHECK(values.size() <= 3);
    }
}

TEST_CASE("Golay Ga128 / Gb128 frozen chips")
{
    const auto a = gen_golay_a128(), b = gen_golay_b128();
    CHECK(std::vector<int>(a.chips().begin(), a.chips().end()) == chips_from_hex("6af365fc950c65fc950c9a03950c65fc"));
    CHECK(std::vector<int>(b.chips().begin(), b.chips().end()) == chips_from_hex("6af365fc950c65fc6af365fc6af39a03"));
    CHECK(periodic_autocorrelation(a)[0] == 128);
}

TEST_CASE("Golay complementarity is exact")
{
    auto check_pair = [](std::span<const int> a, std::span<const int> b)
    {
        const auto ra = aperiodic_autocorrelation(a), rb = aperiodic_autocorrelation(b);
        CHECK(ra[0] + rb[0] == static_cast<std::int64_t>(2 * a.size()));
        for (std::size_t k = 1; k < ra.size(); ++k)
            CHECK(ra[k] + rb[k] == 0);
    };
    check_pair(gen_golay_a128().chips(), gen_golay_b128().chips());
    for (int len : {2, 4, 16, 64, 256, 1024})
    {
        const auto [a, b] = golay_pair(len);
        check_pair(a, b);
    }
}

TEST_CASE("LS codes")
{
    for (int len : ls_supported_lengths())
    {
        const auto s = gen_ls(len);
        CHECK(s.size() == static_cast<std::size_t>(len));
        for (int c : s.chips())
            CHECK((c == 1 || c == -1));
    }
    CHECK_THROWS_AS(gen_ls(7), std::invalid_argument);
    const auto p = ls_padded(16, 3);
    CHECK(p.size() == 22);
}

TEST_CASE("periodic autocorrelation examples")
{
    const std::vector<int> ones(4, 1);
    for (auto v : periodic_autocorrelation(ones))
        CHECK(v == 4);
    const auto s = gen_glfsr(8, 0, 1);
    const auto lib = periodic_autocorrelation(s);
    const auto bf = brute_periodic(s.chips(), s.chips());
    for (std::size_t k = 0; k < bf.size(); ++k)
        CHECK(lib[k] == bf[k]);
}

TEST_CASE("merit report")
{
    const auto g = merit_report(gen_glfsr(8, 0, 1));
    CHECK(g.peak == 255);
    CHECK(g.max_off_peak_abs == 1);
    CHECK(g.peak_to_sidelobe_db == doctest::Approx(20.0 * std::log10(255.0)));
    CHECK(merit_report(gen_golay_a128()).peak == 128);
    const auto again = merit_report(gen_glfsr(8, 0, 1));
    CHECK(again.peak_to_sidelobe_db == g.peak_to_sidelobe_db);
}

TEST_CASE("code specs")
{
    CHECK(parse_code_spec("glfsr:8:0:1").chips().size() == 255);
    CHECK(parse_code_spec("gold:0x43:0x67:0").size() == 63);
    CHECK(parse_code_spec("golay:a128").chips()[0] == gen_golay_a128().chips()[0]);
    CHECK(parse_code_spec("golay:b128").size() == 128);
    CHECK(parse_code_spec("ls:256").size() == 256);
    CHECK_THROWS_AS(parse_code_spec("zc:63"), std::invalid_argument);
    CHECK_THROWS_AS(parse_code_spec("glfsr:8:0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_code_spec("glfsr:x:0:1"), std::invalid_argument);
}
