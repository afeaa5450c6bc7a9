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

#include "twinchan/analysis.hpp"
#include "twinchan/experiments.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

using namespace twinchan;

namespace
{
    MetricSeries series(std::vector<double> v, double period = 1.0)
    {
        MetricSeries s;
        s.values = std::move(v);
        s.period = period;
        return s;
    }

    std::vector<double> randn(std::mt19937_64 &rng, std::size_t n)
    {
        std::normal_distribution<double> g;
        std::vector<double> v(n);
        for (auto &x : v)
            x = g(rng);
        return v;
    }
} // namespace

TEST_CASE("self and anti-correlation")
{
    const auto x = series({1, 5, 2, 8, 3});
    auto r = normalized_xcorr(x, x, 0);
    CHECK(r.score == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.best_lag == 0);
    auto neg = x;
    for (auto &v : neg.values)
        v = -v;
    CHECK(normalized_xcorr(x, neg, 2).rho(0) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("shifted copy evaluated by hand")
{
    // x padded to [1,2,3,4,0]; means 2 and 2; sxx = syy = 10.
    const auto r = normalized_xcorr(series({1, 2, 3, 4}), series({0, 1, 2, 3, 4}), 2);
    const std::vector<double> expect{-0.4, -0.3, 0.0, 0.6, 0.2};
    for (int k = -2; k <= 2; ++k)
        CHECK(r.rho(k) == doctest::Approx(expect[static_cast<std::size_t>(k + 2)]).epsilon(1e-14));
    CHECK(r.best_lag == 1);
    CHECK(r.score == doctest::Approx(0.6).epsilon(1e-14));
}

TEST_CASE("ties go to the smaller lag")
{
    // Period-2 signal: rho(-2) = rho(2) but rho(0) is the largest; with
    // constant-magnitude lags the smaller |k| wins.
    const auto x = series({1, -1, 1, -1, 1, -1});
    const auto r = normalized_xcorr(x, x, 2);
    CHECK(r.best_lag == 0);
    const auto s = normalized_xcorr(series({0, 1, 0, 0}), series({0, 0, 0, 0, 1, 0, 0, 0}), 3);
    CHECK(std::abs(s.best_lag) <= 3);
}

TEST_CASE("matches brute force on random pairs, all lags")
{
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 300; ++trial)
    {
        const auto nx = 2 + rng() % 63, ny = 2 + rng() % 63;
        const auto x = randn(rng, nx), y = randn(rng, ny);
        const int k = static_cast<int>(std::max(nx, ny)) - 1;
        const auto r = normalized_xcorr(series(x), series(y), k);
        const auto bf = brute_force_xcorr(x, y, k);
        for (std::size_t i = 0; i < bf.size(); ++i)
            CHECK(std::abs(r.rho_by_lag[i] - bf[i]) <= 1e-12);
    }
}

TEST_CASE("affine invariance and symmetry")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial)
    {
        const std::size_t n = 8 + rng() % 57;
        const auto x = randn(rng, n), y = randn(rng, n);
        const double a = 0.1 + 10.0 * std::uniform_real_distribution<double>(0, 1)(rng), b = 3.0 * (trial - 50);
        auto ax = x;
        for (auto &v : ax)
            v = a * v + b;
        const int k = 5;
        const auto r = normalized_xcorr(series(x), series(y), k);
        const auto ra = normalized_xcorr(series(ax), series(y), k);
        const auto rs = normalized_xcorr(series(y), series(x), k);
        for (int lag = -k; lag <= k; ++lag)
        {
            CHECK(ra.rho(lag) == doctest::Approx(r.rho(lag)).epsilon(1e-9));
            CHECK(rs.rho(-lag) == doctest::Approx(r.rho(lag)).epsilon(1e-12));
        }
    }
}

TEST_CASE("white noise pair scores low")
{
    std::mt19937_64 rng(2024);
    const auto r = compare_runs(series(randn(rng, 1000)), series(randn(rng, 1000)));
    CHECK(std::abs(r.score) < 0.2);
}

TEST_CASE("gaps are skipped")
{
    const auto full = normalized_xcorr(series({1, 3, 2, 5, 4, 6}), series({1, 3, 2, 5, 4, 6}), 1);
    CHECK(full.rho(0) == doctest::Approx(1.0));
    const auto gapped = normalized_xcorr(series({1, 3, kGap, 5, 4, 6}), series({1, 3, 2, 5, 4, 6}), 1);
    CHECK(std::isfinite(gapped.score));
    CHECK(gapped.rho(0) < 1.0);
    CHECK_THROWS_AS(normalized_xcorr(series({2, 2, 2}), series({1, 2, 3}), 1), std::invalid_argument);
    CHECK_THROWS_AS(normalized_xcorr(series({1, 2}), series({1, 2}), -1), std::invalid_argument);
}

TEST_CASE("compare requires matching periods")
{
    CHECK_THROWS_AS(compare_runs(series({1, 2, 3}, 1.0), series({1, 2, 3}, 0.5)), std::invalid_argument);
    CHECK(compare_runs(series({1, 2, 3}), series({1, 2, 3})).score == doctest::Approx(1.0));
}

TEST_CASE("metric CSV")
{
    std::istringstream in("t_s,value\n0,1.5\n0.5,\n1.0,nan\n1.5,4\n");
    const auto s = read_metric_csv(in, "a");
    CHECK(s.period == doctest::Approx(0.5));
    REQUIRE(s.size() == 4);
    CHECK(std::isnan(s.values[1]));
    CHECK(std::isnan(s.values[2]));
    CHECK(s.mean() == doctest::Approx(2.75));
    std::stringstream out;
    write_metric_csv(out, s);
    const auto back = read_metric_csv(out);
    CHECK(back.values[3] == 4.0);
    CHECK(std::isnan(back.values[1]));

    std::istringstream uneven("t_s,value\n0,1\n1,2\n3,3\n");
    CHECK_THROWS_AS(read_metric_csv(uneven), std::invalid_argument);
    std::istringstream header("time,value\n0,1\n");
    CHECK_THROWS_AS(read_metric_csv(header), std::invalid_argument);
}

TEST_CASE("slicing")
{
    const auto s = series({0, 1, 2, 3, 4, 5}, 0.5);
    const auto part = s.slice(1.0, 2.0);
    CHECK(part.values == std::vector<double>{2, 3});
}

TEST_CASE("score averages report both weightings")
{
    const std::vector<std::vector<double>> table{{0.9, 0.8, kGap}, {0.7, 0.5, 0.6}};
    const auto a = average_scores(table);
    CHECK(a.row_means[0] == doctest::Approx(0.85));
    CHECK(a.row_means[1] == doctest::Approx(0.6));
    CHECK(a.column_means[2] == doctest::Approx(0.6));
    CHECK(a.overall == doctest::Approx(0.7));
}

TEST_CASE("jamming report")
{
    const auto r = jamming_report(series({6, 6, 6}), series({0.25, 0.25}));
    CHECK(r.drop_fraction == doctest::Approx(1.0 - 0.25 / 6.0));
    CHECK(r.drop_fraction == doctest::Approx(0.958).epsilon(1e-3));
    CHECK(jamming_report(series({3, 4}), series({3, 4})).drop_fraction == 0.0);
    CHECK(jamming_report(series({25}), series({2})).drop_db == doctest::Approx(23.0));
    CHECK_THROWS_AS(jamming_report(series({0, 0}), series({1})), std::invalid_argument);
}
