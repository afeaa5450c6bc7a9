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

#ifndef TWINCHAN_JAMMING_HPP
#define TWINCHAN_JAMMING_HPP

#include "twinchan/analysis.hpp"
#include "twinchan/emulator.hpp"

namespace twinchan
{
    // Node ids used by the jam demo.
    inline constexpr int kJamRx = 1;
    inline constexpr int kJamWifi = 2;
    inline constexpr int kJamJammer = 3;

    struct JamConfig
    {
        JammerKind kind = JammerKind::Wideband;
        double bandwidth_hz = 0.0; // 0: kind default
        bool mobile = false;
        double on_s = 20.0;
        double off_s = 40.0;
        double total_s = 60.0;
        double sample_rate = 20.0e6;
        double wifi_power_db = 20.0;
        double jammer_power_db = 20.0;
        int symbols_per_point = 64; // OFDM symbols behind each SINR sample
        double point_period = 1.0;  // s between SINR samples
        std::uint64_t seed = 1;

        // Geometry (m) and propagation.
        Vec3 rx{0.0, 0.0, 1.0};
        Vec3 wifi{3.0, 0.0, 1.0};
        Vec3 jammer{-3.0, 0.0, 1.0};
        Vec3 jammer_start{-18.0, 2.0, 1.0};
        Vec3 jammer_end{54.0, 2.0, 1.0};
        double jammer_speed = 1.2;
        double pathloss_exponent = 2.0;
        double channel_sampling = 0.1; // s between channel snapshots
        double center_freq_hz = 2.412e9;

        void validate() const;
    };

    struct JamResult
    {
        MetricSeries sinr_db;   // one point per point_period, effective SINR
        JammingReport report;   // [0, on) vs [on, off); [off, total) is the baseline when on = 0
        std::vector<std::string> warnings;
    };

    // Single-path log-distance channel, gain 0 dB at 1 m.
    double log_distance_gain_db(double distance_m, double exponent);

    // Ray-path records for every ordered node pair at t = k * channel_sampling.
    RayPathFile jam_ray_paths(const JamConfig &config);
    std::vector<Node> jam_nodes(const JamConfig &config);

    // 64-subcarrier OFDM with BPSK on every subcarrier, unit mean power, no cyclic prefix.
    std::vector<cplx> ofdm_bpsk_burst(int symbols, std::uint64_t seed);

    // Mean over subcarriers of the per-subcarrier SINR (dB), measured on the
    // separated signal and interference-plus-noise components.
    double effective_sinr_db(std::span<const cplx> signal, std::span<const cplx> interference, int fft_size = 64);

    JamResult run_jam_demo(const JamConfig &config, unsigned threads = 1);

} // namespace twinchan

#endif
