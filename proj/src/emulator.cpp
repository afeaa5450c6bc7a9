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

#include "twinchan/emulator.hpp"
#include "twinchan/dsp.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

namespace twinchan
{
    void EmulationSession::validate(Diagnostics *diag) const
    {
        if (!scenario)
            throw std::invalid_argument("EmulationSession: no scenario.");
        if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
            throw std::invalid_argument("EmulationSession: sample rate must be positive.");
        if (sample_rate < kMinSessionRate || sample_rate > kMaxSessionRate)
            warn(diag, "Sample rate " + std::to_string(sample_rate) + " S/s is outside the exercised 1-50 MS/s range.");
        if (!(noise_reference_length > 0.0))
            throw std::invalid_argument("EmulationSession: noise reference length must be positive.");
        for (int id : active_nodes)
            if (!scenario->has_node(id))
                throw std::invalid_argument("EmulationSession: active node " + std::to_string(id) +
                                            " is not in the scenario.");
    }

    double EmulationSession::noise_variance() const
    {
        return db_to_power(scenario->radio().noise_floor_db) * noise_reference_length;
    }

    std::vector<std::size_t> tap_sample_delays(const TapSet &taps, double sample_rate, double slot_width,
                                               Diagnostics *diag)
    {
        std::vector<std::size_t> d;
        d.reserve(taps.size());
        bool aliased = false;
        for (const auto &t : taps.taps())
        {
            const double exact = t.delay_slot * slot_width * sample_rate;
            const double r = std::round(exact);
            if (std::abs(exact - r) > 1e-9)
                aliased = true;
            d.push_back(static_cast<std::size_t>(r));
        }
        if (aliased)
            warn(diag, "Tap delays are not integer samples at " + std::to_string(sample_rate) +
                           " S/s; rounded to the nearest sample.");
        return d;
    }

    namespace
    {
        struct Segment
        {
            std::size_t begin, end; // input samples
            const TapSet *taps;
            std::vector<std::size_t> delays;
        };

        // Tap-major accumulation: every output sample sums its terms in tap order,
        // independent of how the input is split into frames.
        std::vector<cplx> apply_segments(std::span<const cplx> x, const std::vector<Segment> &segments)
        {
            std::size_t max_delay = 0, max_taps = 0;
            for (const auto &s : segments)
            {
                max_taps = std::max(max_taps, s.taps->size());
                for (auto d : s.delays)
                    max_delay = std::max(max_delay, d);
            }
            std::vector<cplx> y(x.size() + max_delay);
            for (std::size_t k = 0; k < max_taps; ++k)
                for (const auto &s : segments)
                {
                    if (k >= s.taps->size())
                        continue;
                    const cplx g = s.taps->taps()[k].gain;
                    cplx *out = y.data() + s.delays[k];
                    for (std::size_t i = s.begin; i < s.end; ++i)
                        out[i] += g * x[i];
                }
            return y;
        }

        std::uint64_t splitmix64(std::uint64_t z)
        {
            z += 0x9e3779b97f4a7c15ull;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
            return z ^ (z >> 31);
        }

        constexpr std::size_t kNoiseBlock = 1u << 16;
    } // namespace

    IqBlock fir_apply(const IqBlock &x, const TapSet &taps, Diagnostics *diag, double slot_width)
    {
        std::vector<Segment> seg{{0, x.size(), &taps, tap_sample_delays(taps, x.sample_rate(), slot_width, diag)}};
        return IqBlock(apply_segments(x.samples(), seg), x.sample_rate(), x.t0());
    }

    IqBlock emulate_link(const IqBlock &x, const CirTimeline &timeline, bool loop, Diagnostics *diag,
                         double slot_width)
    {
        timeline.validate();
        const double sr = x.sample_rate();
        const double spf = timeline.update_interval * sr;
        const double offset = x.t0() * sr;
        const auto frames = static_cast<long long>(timeline.frame_count());

        auto frame_of = [&](std::size_t n)
        {
            const double f = std::floor((offset + static_cast<double>(n)) / spf + 1e-9);
            return std::max(0LL, static_cast<long long>(f));
        };
        auto first_sample = [&](long long f)
        {
            const double s = std::ceil(static_cast<double>(f) * spf - offset - 1e-9 * spf);
            return static_cast<std::size_t>(std::max(0.0, s));
        };

        const long long f_first = frame_of(0);
        const long long f_last = frame_of(x.size() - 1);
        if (!loop && f_last >= frames)
            throw std::invalid_argument("emulate_link: input runs to frame " + std::to_string(f_last) +
                                        " but the timeline has " + std::to_string(frames) + " frames.");

        Diagnostics local;
        std::vector<Segment> segments;
        for (long long f = f_first; f <= f_last; ++f)
        {
            const std::size_t b = f == f_first ? 0 : first_sample(f);
            const std::size_t e = f == f_last ? x.size() : std::min(x.size(), first_sample(f + 1));
            if (b >= e)
                continue;
            const TapSet &taps = timeline.frames[static_cast<std::size_t>(f % frames)];
            segments.push_back({b, e, &taps, tap_sample_delays(taps, sr, slot_width, &local)});
        }
        if (!local.warnings.empty())
            warn(diag, local.warnings.front());
        return IqBlock(apply_segments(x.samples(), segments), sr, x.t0());
    }

    std::vector<cplx> gaussian_noise(std::uint64_t seed, std::uint64_t stream, std::int64_t start, std::size_t count,
                                     double variance)
    {
        std::vector<cplx> out(count);
        if (count == 0 || variance == 0.0)
            return out;
        const double sigma = std::sqrt(variance / 2.0);
        const std::int64_t end = start + static_cast<std::int64_t>(count);
        auto floor_div = [](std::int64_t a, std::int64_t b) { return a >= 0 ? a / b : -((-a + b - 1) / b); };
        const auto block_len = static_cast<std::int64_t>(kNoiseBlock);
        std::vector<cplx> block(kNoiseBlock);
        for (std::int64_t b = floor_div(start, block_len); b * block_len < end; ++b)
        {
            std::mt19937_64 rng(splitmix64(seed ^ splitmix64(stream ^ splitmix64(static_cast<std::uint64_t>(b)))));
            std::normal_distribution<double> nd(0.0, sigma);
            for (auto &v : block)
            {
                const double re = nd(rng);
                const double im = nd(rng);
                v = {re, im};
            }
            const std::int64_t b0 = b * block_len;
            const std::int64_t lo = std::max(start, b0), hi = std::min(end, b0 + block_len);
            for (std::int64_t i = lo; i < hi; ++i)
                out[static_cast<std::size_t>(i - start)] = block[static_cast<std::size_t>(i - b0)];
        }
        return out;
    }

    IqBlock superimpose(int receiver_id, const std::map<int, IqBlock> &inputs, const EmulationSession &session,
                        Diagnostics *diag)
    {
        session.validate(diag);
        if (!session.active_nodes.contains(receiver_id))
            throw std::invalid_argument("superimpose: receiver " + std::to_string(receiver_id) + " is not active.");
        if (inputs.empty())
            throw std::invalid_argument("superimpose: no transmitters.");
        const double t0 = inputs.begin()->second.t0();
        for (const auto &[tx, x] : inputs)
        {
            if (tx == receiver_id)
                throw std::invalid_argument("superimpose: node " + std::to_string(tx) + " cannot transmit to itself.");
            if (!session.active_nodes.contains(tx))
                throw std::invalid_argument("superimpose: transmitter " + std::to_string(tx) + " is not active.");
            if (std::abs(x.sample_rate() - session.sample_rate) > 1e-9 * session.sample_rate)
                throw std::invalid_argument("superimpose: transmitter " + std::to_string(tx) +
                                            " sample rate does not match the session.");
            if (std::abs(x.t0() - t0) > 0.5 / session.sample_rate)
                throw std::invalid_argument("superimpose: transmitter " + std::to_string(tx) + " is not aligned in t0.");
        }

        std::vector<const IqBlock *> blocks;
        std::vector<int> ids;
        for (const auto &[tx, x] : inputs)
        {
            ids.push_back(tx);
            blocks.push_back(&x);
        }
        std::vector<std::vector<cplx>> outputs(blocks.size());
        std::vector<Diagnostics> link_diag(blocks.size());
        const double slot_width = session.scenario->metadata().grid.slot_width;
        parallel_for(blocks.size(), resolve_thread_count(session.threads),
                     [&](std::size_t i)
                     {
                         const auto &tl = session.scenario->link(ids[i], receiver_id);
                         outputs[i] =
                             std::move(emulate_link(*blocks[i], tl, session.loop_timeline, &link_diag[i], slot_width))
                                 .release();
                     });
        for (auto &d : link_diag)
            for (auto &w : d.warnings)
                warn(diag, std::move(w));

        // Base loss is applied per link before the ordered sum, which keeps joint
        // emulation bit-identical to summing single-transmitter runs.
        const double scale = db_to_amplitude(-session.scenario->radio().base_loss_db);
        std::size_t len = 0;
        for (const auto &o : outputs)
            len = std::max(len, o.size());
        std::vector<cplx> y(len);
        for (const auto &o : outputs)
            for (std::size_t n = 0; n < o.size(); ++n)
                y[n] += o[n] * scale;

        if (session.noise_enabled)
        {
            const auto start = static_cast<std::int64_t>(std::llround(t0 * session.sample_rate));
            const auto noise = gaussian_noise(session.rng_seed, static_cast<std::uint64_t>(receiver_id), start, len,
                                              session.noise_variance());
            for (std::size_t n = 0; n < len; ++n)
                y[n] += noise[n];
        }
        return IqBlock(std::move(y), session.sample_rate, t0);
    }

    // ---------- Jammer ----------

    std::string to_string(JammerKind kind) { return kind == JammerKind::Narrowband ? "narrowband" : "wideband"; }

    JammerKind jammer_kind_from_string(const std::string &s)
    {
        if (s == "narrowband")
            return JammerKind::Narrowband;
        if (s == "wideband")
            return JammerKind::Wideband;
        throw std::invalid_argument("Unknown jammer kind '" + s + "' (expected narrowband or wideband).");
    }

    double default_bandwidth(JammerKind kind)
    {
        return kind == JammerKind::Narrowband ? kNarrowbandJammerHz : kWidebandJammerHz;
    }

    IqBlock gen_jammer(JammerKind kind, double bandwidth_hz, double power_db, double duration_s, double sample_rate,
                       std::uint64_t seed, double t0)
    {
        if (bandwidth_hz <= 0.0)
            bandwidth_hz = default_bandwidth(kind);
        if (!(sample_rate > 0.0))
            throw std::invalid_argument("gen_jammer: sample rate must be positive.");
        if (bandwidth_hz > sample_rate)
            throw std::invalid_argument("gen_jammer: bandwidth " + std::to_string(bandwidth_hz) +
                                        " Hz exceeds the sample rate.");
        if (!(duration_s > 0.0))
            throw std::invalid_argument("gen_jammer: duration must be positive.");
        const auto n = static_cast<std::size_t>(std::max(1.0, std::round(duration_s * sample_rate)));

        std::vector<cplx> y;
        const double occupied = bandwidth_hz / sample_rate;
        if (occupied >= 1.0)
            y = gaussian_noise(seed, 0x6a616d, 0, n, 1.0);
        else
        {
            // Transition band sits inside the requested band so the stopband starts at bw/2.
            const double transition = 0.25 * occupied;
            auto taps = static_cast<std::size_t>(std::ceil(5.5 / transition)) | 1u;
            taps = std::clamp<std::size_t>(taps, 31, 16385);
            const double cutoff = std::max(0.5 * occupied - 0.5 * 5.5 / static_cast<double>(taps), 0.25 * occupied);
            const auto h = dsp::design_lowpass(cutoff, taps);
            const auto white = gaussian_noise(seed, 0x6a616d, 0, n + taps - 1, 1.0);
            const auto full = dsp::convolve(white, h);
            y.assign(full.begin() + static_cast<std::ptrdiff_t>(taps - 1),
                     full.begin() + static_cast<std::ptrdiff_t>(taps - 1 + n));
        }
        double p = 0.0;
        for (const auto &v : y)
            p += std::norm(v);
        p /= static_cast<double>(n);
        const double scale = p > 0.0 ? std::sqrt(db_to_power(power_db) / p) : 0.0;
        for (auto &v : y)
            v *= scale;
        return IqBlock(std::move(y), sample_rate, t0);
    }

    double measure_sinr(std::span<const cplx> signal, std::span<const cplx> interference_plus_noise)
    {
        if (signal.size() != interference_plus_noise.size())
            throw std::invalid_argument("measure_sinr: signal and interference lengths differ.");
        double s = 0.0, i = 0.0;
        for (const auto &v : signal)
            s += std::norm(v);
        for (const auto &v : interference_plus_noise)
            i += std::norm(v);
        if (i == 0.0)
            return std::numeric_limits<double>::infinity();
        if (s == 0.0)
            return -std::numeric_limits<double>::infinity();
        return 10.0 * std::log10(s / i);
    }

    double measure_sinr(const IqBlock &signal, const IqBlock &interference_plus_noise)
    {
        return measure_sinr(signal.samples(), interference_plus_noise.samples());
    }

    // ---------- .iq32 ----------

    void write_iq32(const std::filesystem::path &path, const IqBlock &block)
    {
        std::vector<float> buf;
        buf.reserve(2 * block.size());
        for (const auto &v : block.samples())
        {
            buf.push_back(static_cast<float>(v.real()));
            buf.push_back(static_cast<float>(v.imag()));
        }
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("Cannot open " + path.string() + " for writing.");
        out.write(reinterpret_cast<const char *>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
        nlohmann::json side{{"format", "cf32_le"},
                            {"sample_rate", block.sample_rate()},
                            {"t0", block.t0()},
                            {"samples", block.size()}};
        std::ofstream sc(path.string() + ".json");
        sc << side.dump(2) << '\n';
        if (!out || !sc)
            throw std::runtime_error("Failed writing " + path.string() + ".");
    }

    IqBlock read_iq32(const std::filesystem::path &path)
    {
        std::ifstream sc(path.string() + ".json");
        if (!sc)
            throw std::invalid_argument("Missing sidecar " + path.string() + ".json.");
        nlohmann::json side;
        try
        {
            side = nlohmann::json::parse(sc);
        }
        catch (const nlohmann::json::exception &e)
        {
            throw std::invalid_argument("Sidecar " + path.string() + ".json is not valid JSON: " + e.what());
        }
        const double rate = side.value("sample_rate", 0.0);
        const double t0 = side.value("t0", 0.0);

        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::invalid_argument("Cannot open " + path.string() + ".");
        std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        if (raw.size() % (2 * sizeof(float)) != 0)
            throw std::invalid_argument(path.string() + ": size is not a whole number of float32 I/Q pairs.");
        const std::size_t n = raw.size() / (2 * sizeof(float));
        if (side.contains("samples") && side["samples"].get<std::size_t>() != n)
            throw std::invalid_argument(path.string() + ": sample count disagrees with the sidecar.");
        std::vector<float> f(2 * n);
        std::memcpy(f.data(), raw.data(), raw.size());
        std::vector<cplx> s(n);
        for (std::size_t i = 0; i < n; ++i)
            s[i] = {f[2 * i], f[2 * i + 1]};
        return IqBlock(std::move(s), rate, t0);
    }

} // namespace twinchan
