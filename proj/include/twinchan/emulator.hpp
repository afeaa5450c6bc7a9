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

#ifndef TWINCHAN_EMULATOR_HPP
#define TWINCHAN_EMULATOR_HPP

#include "twinchan/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <set>

namespace twinchan
{
    inline constexpr double kMinSessionRate = 1.0e6;
    inline constexpr double kMaxSessionRate = 50.0e6;
    inline constexpr double kDefaultNoiseReferenceLength = 255.0;

    // A running emulation: which nodes take part, at what rate, and how noise is drawn.
    struct EmulationSession
    {
        std::shared_ptr<const Scenario> scenario;
        std::set<int> active_nodes;
        double sample_rate = 1.0e6;
        std::uint64_t rng_seed = 1;
        bool noise_enabled = true;
        bool loop_timeline = false; // wrap frame index instead of failing past the end
        unsigned threads = 1;

        // Per-sample noise variance is noise_floor * noise_reference_length, so a
        // probe correlating over that many samples sees |h|^2 = noise_floor.
        double noise_reference_length = kDefaultNoiseReferenceLength;

        void validate(Diagnostics *diag = nullptr) const;
        double noise_variance() const;
    };

    // Sample offset of each tap at sample_rate: round(slot * slot_width * sample_rate).
    // Warns once per call when a slot does not land on a sample.
    std::vector<std::size_t> tap_sample_delays(const TapSet &taps, double sample_rate, double slot_width = kSlotWidth,
                                               Diagnostics *diag = nullptr);

    // y(n) = sum_k g_k x(n - d_k); output length = len(x) + max d_k.
    IqBlock fir_apply(const IqBlock &x, const TapSet &taps, Diagnostics *diag = nullptr,
                      double slot_width = kSlotWidth);

    // Time-varying FIR: input sample n uses the frame in force at t0 + n/sr and its
    // tail carries into later frames (overlap-add). Output length = len(x) + max d.
    IqBlock emulate_link(const IqBlock &x, const CirTimeline &timeline, bool loop = false,
                         Diagnostics *diag = nullptr, double slot_width = kSlotWidth);

    // Receiver-side sum over transmitters, then base loss and (optionally) noise.
    // Inputs must share sample rate and t0; shorter outputs are zero-extended.
    IqBlock superimpose(int receiver_id, const std::map<int, IqBlock> &inputs, const EmulationSession &session,
                        Diagnostics *diag = nullptr);

    // Circularly-symmetric Gaussian noise of the given per-sample variance for
    // absolute sample indices [start, start + count). Drawn in fixed blocks keyed
    // by (seed, stream, block index), so any sub-range reproduces the same values.
    std::vector<cplx> gaussian_noise(std::uint64_t seed, std::uint64_t stream, std::int64_t start, std::size_t count,
                                     double variance);

    enum class JammerKind
    {
        Narrowband,
        Wideband
    };

    inline constexpr double kNarrowbandJammerHz = 156.0e3;
    inline constexpr double kWidebandJammerHz = 10.0e6;

    std::string to_string(JammerKind kind);
    JammerKind jammer_kind_from_string(const std::string &s);
    double default_bandwidth(JammerKind kind);

    // Low-pass filtered white Gaussian noise occupying [-bw/2, bw/2], mean power
    // exactly 10^(power_db/10). The kind only selects the default bandwidth when
    // bandwidth_hz <= 0.
    IqBlock gen_jammer(JammerKind kind, double bandwidth_hz, double power_db, double duration_s, double sample_rate,
                       std::uint64_t seed, double t0 = 0.0);

    // 10 log10(sum |s|^2 / sum |i+n|^2); +inf when the denominator is zero.
    double measure_sinr(const IqBlock &signal, const IqBlock &interference_plus_noise);
    double measure_sinr(std::span<const cplx> signal, std::span<const cplx> interference_plus_noise);

    // .iq32: interleaved little-endian float32 I/Q, with a JSON sidecar <file>.json
    // holding sample_rate, t0 and the sample count.
    void write_iq32(const std::filesystem::path &path, const IqBlock &block);
    IqBlock read_iq32(const std::filesystem::path &path);

} // namespace twinchan

#endif
