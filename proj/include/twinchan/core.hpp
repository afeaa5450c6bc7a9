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

#ifndef TWINCHAN_CORE_HPP
#define TWINCHAN_CORE_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace twinchan
{
    using cplx = std::complex<double>;

    // Emulator tap grid. These are properties of the emulated hardware; the only
    // override point is TapGrid inside a Scenario's metadata.
    inline constexpr double kSlotWidth = 10.0e-9;   // seconds per delay slot
    inline constexpr int kSlotCount = 512;          // FIR length, i.e. 5.12 us max excess delay
    inline constexpr int kMaxActiveTaps = 4;        // non-zero taps per FIR snapshot
    inline constexpr double kDefaultUpdateInterval = 1.0e-3;
    inline constexpr double kDefaultNoiseFloorDb = -100.0;
    inline constexpr double kDefaultBaseLossDb = 57.55;
    inline constexpr double kPathGainFloorDb = -200.0;

    struct TapGrid
    {
        double slot_width = kSlotWidth;
        int slot_count = kSlotCount;
    };

    // Non-fatal conditions collected during processing (delay aliasing, dropped
    // paths, coherence-distance violations). Passed by pointer; may be null.
    struct Diagnostics
    {
        std::vector<std::string> warnings;
        void warn(std::string message) { warnings.push_back(std::move(message)); }
    };

    inline void warn(Diagnostics *diag, std::string message)
    {
        if (diag != nullptr)
            diag->warn(std::move(message));
    }

    // ---------- dB bridges ----------
    // Amplitude and power conversions are separate functions on purpose: the
    // caller states which one applies, nothing is inferred.

    double db_to_amplitude(double x_db); // 10^(x/20)
    double db_to_power(double x_db);     // 10^(x/10)
    double amplitude_to_db(double ratio); // 20 log10(ratio), ratio > 0
    double power_to_db(double ratio);     // 10 log10(ratio), ratio > 0

    // ---------- IqBlock ----------

    // Complex baseband samples at a fixed rate. Immutable after construction.
    class IqBlock
    {
    public:
        IqBlock(std::vector<cplx> samples, double sample_rate, double t0 = 0.0);

        std::span<const cplx> samples() const { return samples_; }
        const cplx &operator[](std::size_t i) const { return samples_[i]; }
        std::size_t size() const { return samples_.size(); }
        double sample_rate() const { return sample_rate_; }
        double t0() const { return t0_; }
        double duration() const { return static_cast<double>(samples_.size()) / sample_rate_; }
        double energy() const;
        double mean_power() const { return energy() / static_cast<double>(samples_.size()); }

        // Moves the samples out; the block is left valid but should not be reused.
        std::vector<cplx> release() && { return std::move(samples_); }

    private:
        std::vector<cplx> samples_;
        double sample_rate_;
        double t0_;
    };

    // ---------- Taps ----------

    struct Tap
    {
        int delay_slot = 0; // index on the 10 ns grid
        cplx gain{};        // linear complex amplitude
        bool operator==(const Tap &) const = default;
    };

    // One FIR snapshot: at most kMaxActiveTaps non-zero taps, strictly increasing slots.
    class TapSet
    {
    public:
        TapSet() = default;
        explicit TapSet(std::vector<Tap> taps, int slot_count = kSlotCount);

        std::span<const Tap> taps() const { return taps_; }
        std::size_t size() const { return taps_.size(); }
        bool empty() const { return taps_.empty(); }
        int max_slot() const { return taps_.empty() ? 0 : taps_.back().delay_slot; }
        double total_power() const; // sum |g|^2
        bool operator==(const TapSet &) const = default;

    private:
        std::vector<Tap> taps_;
    };

    // Piecewise-constant channel: frame k is in force over [k*dt, (k+1)*dt).
    struct CirTimeline
    {
        double update_interval = kDefaultUpdateInterval;
        std::vector<TapSet> frames;
        std::vector<double> propagation_delays; // first-arrival delay removed per frame, seconds

        void validate() const;
        std::size_t frame_count() const { return frames.size(); }
        double duration() const { return update_interval * static_cast<double>(frames.size()); }
        std::size_t max_slot() const;
    };

    struct RayPath
    {
        double toa = 0.0; // seconds
        cplx gain{};
    };

    // Multipath snapshot before quantization to the tap grid. Paths are kept sorted by ToA.
    class RawCir
    {
    public:
        RawCir(std::vector<RayPath> paths, double timestamp);

        std::span<const RayPath> paths() const { return paths_; }
        std::size_t path_count() const { return paths_.size(); }
        double timestamp() const { return timestamp_; }
        double total_power() const;

    private:
        std::vector<RayPath> paths_;
        double timestamp_;
    };

    struct RadioParams
    {
        double tx_power_db = 0.0;
        double tx_gain_db = 0.0;
        double rx_gain_db = 0.0;
        double center_freq_hz = 1.0e9;
        double noise_floor_db = kDefaultNoiseFloorDb;
        double base_loss_db = kDefaultBaseLossDb;

        void validate() const;
    };

    // ---------- Misc ----------

    // Worker count: explicit value if > 0, else TWINCHAN_THREADS, else hardware concurrency.
    unsigned resolve_thread_count(unsigned requested = 0);

    // Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
    // processed exactly once; callers write results to per-index slots so the
    // outcome does not depend on scheduling.
    void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> &fn);

} // namespace twinchan

#endif
