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
#include "twinchan/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace twinchan
{
    namespace
    {
        constexpr double kSpeedOfLight = 299792458.0;
        constexpr int kSubcarriers = 64;
    } // namespace

    void JamConfig::validate() const
    {
        if (!(sample_rate > 0.0))
            throw std::invalid_argument("jam: sample rate must be positive.");
        if (!(total_s > 0.0) || !(point_period > 0.0) || !(channel_sampling > 0.0))
            throw std::invalid_argument("jam: durations must be positive.");
        if (!(on_s >= 0.0) || !(off_s > on_s) || off_s > total_s)
            throw std::invalid_argument("jam: need 0 <= on < off <= total.");
        if (symbols_per_point < 1)
            throw std::invalid_argument("jam: at least one OFDM symbol per point.");
        if (static_cast<double>(symbols_per_point * kSubcarriers) / sample_rate > point_period)
            throw std::invalid_argument("jam: OFDM burst is longer than the point period.");
        if (!(jammer_speed > 0.0))
            throw std::invalid_argument("jam: jammer speed must be positive.");
    }

    double log_distance_gain_db(double distance_m, double exponent)
    {
        return -10.0 * exponent * std::log10(std::max(distance_m, 1.0));
    }

    std::vector<Node> jam_nodes(const JamConfig &config)
    {
        std::vector<Node> nodes{{kJamRx, NodeKind::Static, config.rx, 0.0, {}},
                                {kJamWifi, NodeKind::Static, config.wifi, 0.0, {}}};
        if (config.mobile)
            nodes.push_back({kJamJammer, NodeKind::Mobile, config.jammer_start, config.jammer_speed,
                             {config.jammer_start, config.jammer_end}});
        else
            nodes.push_back({kJamJammer, NodeKind::Static, config.jammer, 0.0, {}});
        return nodes;
    }

    RayPathFile jam_ray_paths(const JamConfig &config)
    {
        config.validate();
        const auto nodes = jam_nodes(config);
        const auto samples = static_cast<std::size_t>(std::ceil(config.total_s / config.channel_sampling - 1e-9));
        std::vector<std::vector<Vec3>> positions;
        for (const auto &n : nodes)
            positions.push_back(n.kind == NodeKind::Mobile ? sample_trajectory(n, config.channel_sampling)
                                                           : std::vector<Vec3>{n.position});
        RayPathFile file;
        for (std::size_t k = 0; k < samples; ++k)
        {
            const double t = static_cast<double>(k) * config.channel_sampling;
            for (std::size_t a = 0; a < nodes.size(); ++a)
                for (std::size_t b = 0; b < nodes.size(); ++b)
                {
                    if (a == b)
                        continue;
                    const auto &pa = positions[a][std::min(k, positions[a].size() - 1)];
                    const auto &pb = positions[b][std::min(k, positions[b].size() - 1)];
                    const double d = distance(pa, pb);
                    const double phase =
                        std::remainder(-2.0 * std::numbers::pi * config.center_freq_hz * d / kSpeedOfLight,
                                       2.0 * std::numbers::pi);
                    file.records.push_back({t, nodes[a].id, nodes[b].id, d / kSpeedOfLight,
                                            log_distance_gain_db(d, config.pathloss_exponent), phase});
                }
        }
        return file;
    }

    std::vector<cplx> ofdm_bpsk_burst(int symbols, std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        std::vector<cplx> out;
        out.reserve(static_cast<std::size_t>(symbols) * kSubcarriers);
        std::vector<cplx> bins(kSubcarriers);
        const double scale = 1.0 / std::sqrt(static_cast<double>(kSubcarriers));
        for (int s = 0; s < symbols; ++s)
        {
            for (auto &b : bins)
                b = (rng() & 1u) ? -1.0 : 1.0;
            const auto t = dsp::ifft(bins);
            for (const auto &v : t)
                out.push_back(v * scale);
        }
        return out;
    }

    double effective_sinr_db(std::span<const cplx> signal, std::span<const cplx> interference, int fft_size)
    {
        if (signal.size() != interference.size())
            throw std::invalid_argument("effective_sinr_db: lengths differ.");
        const auto n = static_cast<std::size_t>(fft_size);
        if (n == 0 || signal.size() < n)
            throw std::invalid_argument("effective_sinr_db: need at least one FFT block.");
        std::vector<double> ps(n, 0.0), pi(n, 0.0);
        for (std::size_t off = 0; off + n <= signal.size(); off += n)
        {
            const auto fs = dsp::fft(signal.subspan(off, n));
            const auto fi = dsp::fft(interference.subspan(off, n));
            for (std::size_t k = 0; k < n; ++k)
            {
                ps[k] += std::norm(fs[k]);
                pi[k] += std::norm(fi[k]);
            }
        }
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t k = 0; k < n; ++k)
            if (pi[k] > 0.0 && ps[k] > 0.0)
            {
                sum += 10.0 * std::log10(ps[k] / pi[k]);
                ++count;
            }
        if (count == 0)
            throw std::invalid_argument("effective_sinr_db: no subcarrier carries both signal and interference.");
        return sum / static_cast<double>(count);
    }

    JamResult run_jam_demo(const JamConfig &config, unsigned threads)
    {
        config.validate();
        Diagnostics diag;
        const auto rawcirs = parse_ray_paths(jam_ray_paths(config));
        RadioParams radio;
        radio.center_freq_hz = config.center_freq_hz;
        BuildOptions opts;
        opts.name = std::string("jam-") + (config.mobile ? "mobile-" : "static-") + to_string(config.kind);
        opts.threads = threads;
        auto scenario = std::make_shared<const Scenario>(
            build_scenario(jam_nodes(config), radio, rawcirs, config.channel_sampling, opts, &diag));

        EmulationSession noisy;
        noisy.scenario = scenario;
        noisy.active_nodes = {kJamRx, kJamWifi, kJamJammer};
        noisy.sample_rate = config.sample_rate;
        noisy.rng_seed = config.seed;
        noisy.noise_enabled = true;
        EmulationSession clean = noisy;
        clean.noise_enabled = false;

        const auto points = static_cast<std::size_t>(std::floor(config.total_s / config.point_period + 1e-9));
        const double wifi_amp = db_to_amplitude(config.wifi_power_db);
        const std::size_t n = static_cast<std::size_t>(config.symbols_per_point) * kSubcarriers;

        JamResult res;
        res.sinr_db.period = config.point_period;
        res.sinr_db.label = "sinr_db";
        res.sinr_db.values.assign(points, kGap);
        std::vector<Diagnostics> point_diag(points);
        parallel_for(points, resolve_thread_count(threads),
                     [&](std::size_t i)
                     {
                         const double t_point = static_cast<double>(i) * config.point_period;
                         const double t0 = t_point + 0.5 * config.point_period;
                         auto wifi = ofdm_bpsk_burst(config.symbols_per_point, config.seed * 0x9e3779b97f4a7c15ull + i);
                         for (auto &v : wifi)
                             v *= wifi_amp;
                         const bool active = t_point >= config.on_s - 1e-9 && t_point < config.off_s - 1e-9;
                         IqBlock jam = active ? gen_jammer(config.kind, config.bandwidth_hz, config.jammer_power_db,
                                                           static_cast<double>(n) / config.sample_rate,
                                                           config.sample_rate, config.seed + 7919 * (i + 1), t0)
                                              : IqBlock(std::vector<cplx>(n), config.sample_rate, t0);

                         std::map<int, IqBlock> s_in, i_in;
                         s_in.emplace(kJamWifi, IqBlock(std::move(wifi), config.sample_rate, t0));
                         i_in.emplace(kJamJammer, std::move(jam));
                         const auto s = superimpose(kJamRx, s_in, clean, &point_diag[i]);
                         const auto in = superimpose(kJamRx, i_in, noisy, &point_diag[i]);
                         res.sinr_db.values[i] = effective_sinr_db(s.samples().first(n), in.samples().first(n));
                     });
        for (auto &w : diag.warnings)
            res.warnings.push_back(w);
        for (auto &d : point_diag)
            for (auto &w : d.warnings)
                if (std::find(res.warnings.begin(), res.warnings.end(), w) == res.warnings.end())
                    res.warnings.push_back(w);
        auto baseline = res.sinr_db.slice(0.0, config.on_s);
        if (baseline.values.empty())
            baseline = res.sinr_db.slice(config.off_s, config.total_s);
        if (!baseline.values.empty())
            res.report = jamming_report(baseline, res.sinr_db.slice(config.on_s, config.off_s));
        return res;
    }

} // namespace twinchan
