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

#include "twinchan/core.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace twinchan
{
    static void require_finite(double x, const char *what)
    {
        if (!std::isfinite(x))
            throw std::invalid_argument(std::string(what) + ": input must be finite.");
    }

    double db_to_amplitude(double x_db)
    {
        require_finite(x_db, "db_to_amplitude");
        return std::pow(10.0, x_db / 20.0);
    }

    double db_to_power(double x_db)
    {
        require_finite(x_db, "db_to_power");
        return std::pow(10.0, x_db / 10.0);
    }

    double amplitude_to_db(double ratio)
    {
        require_finite(ratio, "amplitude_to_db");
        if (ratio <= 0.0)
            throw std::invalid_argument("amplitude_to_db: ratio must be positive.");
        return 20.0 * std::log10(ratio);
    }

    double power_to_db(double ratio)
    {
        require_finite(ratio, "power_to_db");
        if (ratio <= 0.0)
            throw std::invalid_argument("power_to_db: ratio must be positive.");
        return 10.0 * std::log10(ratio);
    }

    IqBlock::IqBlock(std::vector<cplx> samples, double sample_rate, double t0)
        : samples_(std::move(samples)), sample_rate_(sample_rate), t0_(t0)
    {
        if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_))
            throw std::invalid_argument("IqBlock: sample rate must be positive and finite.");
        if (samples_.empty())
            throw std::invalid_argument("IqBlock: at least one sample is required.");
        if (!std::isfinite(t0_) || !std::isfinite(duration()))
            throw std::invalid_argument("IqBlock: start time and duration must be finite.");
    }

    double IqBlock::energy() const
    {
        double e = 0.0;
        for (const auto &s : samples_)
            e += std::norm(s);
        return e;
    }

    TapSet::TapSet(std::vector<Tap> taps, int slot_count) : taps_(std::move(taps))
    {
        int active = 0;
        for (std::size_t i = 0; i < taps_.size(); ++i)
        {
            const auto &t = taps_[i];
            if (t.delay_slot < 0 || t.delay_slot >= slot_count)
                throw std::invalid_argument("TapSet: delay slot " + std::to_string(t.delay_slot) +
                                            " outside [0, " + std::to_string(slot_count - 1) + "].");
            if (!std::isfinite(t.gain.real()) || !std::isfinite(t.gain.imag()))
                throw std::invalid_argument("TapSet: tap gain must be finite.");
            if (i > 0 && t.delay_slot <= taps_[i - 1].delay_slot)
                throw std::invalid_argument("TapSet: delay slots must be strictly increasing.");
            if (t.gain != cplx{})
                ++active;
        }
        if (active > kMaxActiveTaps)
            throw std::invalid_argument("TapSet: " + std::to_string(active) + " non-zero taps, at most " +
                                        std::to_string(kMaxActiveTaps) + " allowed.");
    }

    double TapSet::total_power() const
    {
        double p = 0.0;
        for (const auto &t : taps_)
            p += std::norm(t.gain);
        return p;
    }

    void CirTimeline::validate() const
    {
        if (!(update_interval > 0.0))
            throw std::invalid_argument("CirTimeline: update interval must be positive.");
        if (frames.empty())
            throw std::invalid_argument("CirTimeline: at least one frame is required.");
        if (!propagation_delays.empty() && propagation_delays.size() != frames.size())
            throw std::invalid_argument("CirTimeline: one propagation delay per frame expected.");
    }

    std::size_t CirTimeline::max_slot() const
    {
        int m = 0;
        for (const auto &f : frames)
            m = std::max(m, f.max_slot());
        return static_cast<std::size_t>(m);
    }

    RawCir::RawCir(std::vector<RayPath> paths, double timestamp) : paths_(std::move(paths)), timestamp_(timestamp)
    {
        if (!std::isfinite(timestamp_))
            throw std::invalid_argument("RawCir: timestamp must be finite.");
        for (const auto &p : paths_)
        {
            if (!(p.toa >= 0.0) || !std::isfinite(p.toa))
                throw std::invalid_argument("RawCir: time of arrival must be finite and non-negative.");
            if (!std::isfinite(p.gain.real()) || !std::isfinite(p.gain.imag()))
                throw std::invalid_argument("RawCir: path gain must be finite.");
        }
        std::stable_sort(paths_.begin(), paths_.end(),
                         [](const RayPath &a, const RayPath &b) { return a.toa < b.toa; });
    }

    double RawCir::total_power() const
    {
        double p = 0.0;
        for (const auto &path : paths_)
            p += std::norm(path.gain);
        return p;
    }

    void RadioParams::validate() const
    {
        for (double v : {tx_power_db, tx_gain_db, rx_gain_db, center_freq_hz, noise_floor_db, base_loss_db})
            if (!std::isfinite(v))
                throw std::invalid_argument("RadioParams: all fields must be finite.");
        if (!(noise_floor_db < 0.0))
            throw std::invalid_argument("RadioParams: noise floor must be negative (dB).");
        if (!(base_loss_db >= 0.0))
            throw std::invalid_argument("RadioParams: base loss must be non-negative (dB).");
        if (!(center_freq_hz > 0.0))
            throw std::invalid_argument("RadioParams: center frequency must be positive.");
    }

    unsigned resolve_thread_count(unsigned requested)
    {
        if (requested > 0)
            return requested;
        if (const char *env = std::getenv("TWINCHAN_THREADS"))
        {
            char *end = nullptr;
            long v = std::strtol(env, &end, 10);
            if (end != env && v > 0)
                return static_cast<unsigned>(v);
        }
        return std::max(1u, std::thread::hardware_concurrency());
    }

    void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> &fn)
    {
        threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
        if (threads == 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                fn(i);
            return;
        }

        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto worker = [&]
        {
            for (std::size_t i = next++; i < n; i = next++)
            {
                try
                {
                    fn(i);
                }
                catch (...)
                {
                    std::lock_guard lock(error_mutex);
                    if (!first_error)
                        first_error = std::current_exception();
                }
            }
        };
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        pool.clear();
        if (first_error)
            std::rethrow_exception(first_error);
    }

} // namespace twinchan
