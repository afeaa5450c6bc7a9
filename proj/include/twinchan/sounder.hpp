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

#ifndef TWINCHAN_SOUNDER_HPP
#define TWINCHAN_SOUNDER_HPP

#include "twinchan/emulator.hpp"
#include "twinchan/sequences.hpp"

#include <optional>
#include <stdexcept>

namespace twinchan
{
    // Raised when the correlation never rises above the detection threshold.
    class NoSignalError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    struct SoundingConfig
    {
        seq::CodeSequence code = seq::gen_glfsr(8, 0, 1);
        int repetitions = 0;           // 0: as many whole periods as fit in capture_duration
        double sample_rate = 1.0e6;
        double chip_rate = 0.0;        // 0: one sample per chip
        double capture_duration = 3.0; // s
        double tx_gain_db = 0.0;       // sounder front-end gains, on top of RadioParams
        double rx_gain_db = 0.0;
        double threshold_db = 12.0;    // peak threshold above the per-frame median
        std::size_t keep_frames = 8;   // |h| traces retained in the result
        std::size_t chunk_samples = 1u << 20;

        void validate() const;
        std::size_t samples_per_chip() const;
        std::size_t period_samples() const { return code.size() * samples_per_chip(); }
        int resolved_repetitions() const;
    };

    struct SoundedTap
    {
        double toa = 0.0;       // s, relative to the strongest path
        double gain_db = 0.0;   // median over frames
        double mean_db = 0.0;
        double sd_db = 0.0;
        double detection_rate = 0.0;
        std::size_t offset = 0; // samples after the strongest path
    };

    struct SoundingResult
    {
        std::vector<std::vector<double>> cir_frames; // first keep_frames |h| traces, one period each
        std::vector<double> mean_cir;                // |h| averaged over all frames
        std::vector<SoundedTap> taps;                // sorted by toa
        std::vector<double> strongest_gain_db;       // per valid frame
        double path_loss_db = 0.0;                   // -mean(strongest_gain_db)
        double path_loss_sd_db = 0.0;
        double d_peak = 0.0;                         // period / sample_rate
        std::size_t frames = 0;
        std::size_t valid_frames = 0;
    };

    // Chips on I, Q = 0, each chip held sample_rate/chip_rate samples.
    IqBlock bpsk_modulate(const seq::CodeSequence &code, int repetitions, double sample_rate, double chip_rate);

    // h(k) = sum_n s(n) r(n+k) / (s^T s) for the one-period real reference s, so
    // hI = Re h and hQ = Im h. Zero-padded past the end of rx; len(h) = len(rx).
    struct CirEstimate
    {
        std::vector<double> h_i;
        std::vector<double> h_q;
    };
    CirEstimate estimate_cir(const IqBlock &rx, const seq::CodeSequence &code, std::size_t samples_per_chip);

    std::vector<double> cir_magnitude(std::span<const double> h_i, std::span<const double> h_q);

    // 20 log10|h| - P_t - G_t - G_r, floored at kPathGainFloorDb.
    std::vector<double> path_gain_db(std::span<const double> h_mag, const RadioParams &params);
    double path_gain_db(double h_mag, const RadioParams &params);

    struct ExtractedTap
    {
        double toa = 0.0;
        double gain_db = 0.0;
        std::size_t index = 0; // position inside the window
    };

    // Taps inside one period window [offset, offset + period): cyclic local maxima
    // whose power exceeds the window median by threshold_db. The strongest anchors
    // toa 0. Throws NoSignalError when nothing passes.
    std::vector<ExtractedTap> extract_taps(std::span<const double> h_mag, double sample_rate, std::size_t period,
                                           const RadioParams &params, double threshold_db = 12.0,
                                           std::size_t offset = 0);

    // Sounds tx -> rx through session's emulator. Frames are whole code periods,
    // first and last discarded. Works in chunks so long captures stream.
    SoundingResult sound_link(const EmulationSession &session, int tx, int rx, const SoundingConfig &config,
                              Diagnostics *diag = nullptr);

    struct LossMatrix
    {
        std::vector<int> node_ids;
        std::vector<std::vector<double>> loss_db; // NaN on the diagonal and for undetected links
        std::vector<std::vector<double>> sd_db;
        std::vector<std::vector<bool>> no_signal;

        double mean_loss() const;  // over detected off-diagonal entries
        std::size_t detected() const;
    };

    // All ordered pairs of active nodes, links sounded concurrently.
    LossMatrix sound_matrix(const EmulationSession &session, const SoundingConfig &config, unsigned threads = 1,
                            Diagnostics *diag = nullptr);

    void write_loss_matrix_csv(std::ostream &out, const LossMatrix &m);

} // namespace twinchan

#endif
