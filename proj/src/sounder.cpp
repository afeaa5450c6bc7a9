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

#include "twinchan/sounder.hpp"
#include "twinchan/dsp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>

namespace twinchan
{
    void SoundingConfig::validate() const
    {
        if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
            throw std::invalid_argument("Sounding: sample rate must be positive.");
        if (chip_rate < 0.0 || chip_rate > sample_rate)
            throw std::invalid_argument("Sounding: chip rate must not exceed the sample rate.");
        (void)samples_per_chip();
        if (repetitions < 0)
            throw std::invalid_argument("Sounding: repetitions must be non-negative.");
        if (!(capture_duration > 0.0))
            throw std::invalid_argument("Sounding: capture duration must be positive.");
        const double needed = static_cast<double>(repetitions) * static_cast<double>(period_samples()) / sample_rate;
        if (repetitions > 0 && capture_duration + 1e-12 < needed)
            throw std::invalid_argument("Sounding: capture duration is shorter than the requested repetitions.");
        if (resolved_repetitions() < 3)
            throw std::invalid_argument("Sounding: at least 3 code periods must fit in the capture.");
        if (!(threshold_db > 0.0))
            throw std::invalid_argument("Sounding: threshold must be positive (dB above median).");
    }

    std::size_t SoundingConfig::samples_per_chip() const
    {
        if (chip_rate == 0.0)
            return 1;
        const double spc = sample_rate / chip_rate;
        const double r = std::round(spc);
        if (r < 1.0 || std::abs(spc - r) > 1e-9 * spc)
            throw std::invalid_argument("Sounding: sample_rate / chip_rate must be an integer.");
        return static_cast<std::size_t>(r);
    }

    int SoundingConfig::resolved_repetitions() const
    {
        if (repetitions > 0)
            return repetitions;
        return static_cast<int>(std::floor(capture_duration * sample_rate / static_cast<double>(period_samples()) + 1e-9));
    }

    IqBlock bpsk_modulate(const seq::CodeSequence &code, int repetitions, double sample_rate, double chip_rate)
    {
        if (repetitions < 1)
            throw std::invalid_argument("bpsk_modulate: repetitions must be at least 1.");
        SoundingConfig cfg;
        cfg.sample_rate = sample_rate;
        cfg.chip_rate = chip_rate;
        if (chip_rate <= 0.0 || chip_rate > sample_rate)
            throw std::invalid_argument("bpsk_modulate: chip rate must be in (0, sample_rate].");
        const std::size_t spc = cfg.samples_per_chip();
        std::vector<cplx> s;
        s.reserve(code.size() * spc * static_cast<std::size_t>(repetitions));
        for (int r = 0; r < repetitions; ++r)
            for (int c : code.chips())
                s.insert(s.end(), spc, cplx{static_cast<double>(c), 0.0});
        return IqBlock(std::move(s), sample_rate);
    }

    namespace
    {
        std::vector<double> reference(const seq::CodeSequence &code, std::size_t spc)
        {
            std::vector<double> ref;
            ref.reserve(code.size() * spc);
            for (int c : code.chips())
                ref.insert(ref.end(), spc, static_cast<double>(c));
            return ref;
        }
    } // namespace

    CirEstimate estimate_cir(const IqBlock &rx, const seq::CodeSequence &code, std::size_t samples_per_chip)
    {
        if (samples_per_chip == 0)
            throw std::invalid_argument("estimate_cir: samples per chip must be positive.");
        const auto ref = reference(code, samples_per_chip);
        if (rx.size() < ref.size())
            throw std::invalid_argument("estimate_cir: capture is shorter than one code period.");
        const auto chi = dsp::cross_correlate(ref, rx.samples());
        const double energy = static_cast<double>(ref.size()); // s^T s for +-1 chips
        CirEstimate h;
        h.h_i.resize(chi.size());
        h.h_q.resize(chi.size());
        for (std::size_t k = 0; k < chi.size(); ++k)
        {
            h.h_i[k] = chi[k].real() / energy;
            h.h_q[k] = chi[k].imag() / energy;
        }
        return h;
    }

    std::vector<double> cir_magnitude(std::span<const double> h_i, std::span<const double> h_q)
    {
        if (h_i.size() != h_q.size())
            throw std::invalid_argument("cir_magnitude: I and Q lengths differ.");
        std::vector<double> m(h_i.size());
        for (std::size_t k = 0; k < m.size(); ++k)
            m[k] = std::hypot(h_i[k], h_q[k]);
        return m;
    }

    double path_gain_db(double h_mag, const RadioParams &params)
    {
        if (h_mag < 0.0 || !std::isfinite(h_mag))
            throw std::invalid_argument("path_gain_db: |h| must be finite and non-negative.");
        const double g = h_mag > 0.0 ? 20.0 * std::log10(h_mag) : -std::numeric_limits<double>::infinity();
        return std::max(kPathGainFloorDb, g - params.tx_power_db - params.tx_gain_db - params.rx_gain_db);
    }

    std::vector<double> path_gain_db(std::span<const double> h_mag, const RadioParams &params)
    {
        std::vector<double> g(h_mag.size());
        for (std::size_t k = 0; k < g.size(); ++k)
            g[k] = path_gain_db(h_mag[k], params);
        return g;
    }

    namespace
    {
        struct FrameScan
        {
            bool valid = false;
            std::size_t anchor = 0;
            std::vector<std::size_t> offsets; // detected peaks, relative to anchor
        };

        // p holds |h|^2 over one period.
        FrameScan scan_frame(std::span<const double> p, double threshold_db, std::vector<double> &scratch)
        {
            FrameScan f;
            const std::size_t n = p.size();
            scratch.assign(p.begin(), p.end());
            auto mid = scratch.begin() + static_cast<std::ptrdiff_t>(n / 2);
            std::nth_element(scratch.begin(), mid, scratch.end());
            const double threshold = *mid * std::pow(10.0, threshold_db / 10.0);
            f.anchor = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
            if (!(p[f.anchor] > threshold))
                return f;
            f.valid = true;
            for (std::size_t i = 0; i < n; ++i)
            {
                const double prev = p[(i + n - 1) % n], next = p[(i + 1) % n];
                if (p[i] > threshold && p[i] > prev && p[i] >= next)
                    f.offsets.push_back((i + n - f.anchor) % n);
            }
            std::sort(f.offsets.begin(), f.offsets.end());
            return f;
        }

        double mean_of(const std::vector<double> &v)
        {
            return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        }

        double sd_of(const std::vector<double> &v)
        {
            if (v.size() < 2)
                return 0.0;
            // Shifted two-pass form: deviations from v[0] are exact zeros for
            // constant input, so a constant series has SD exactly 0.
            double s1 = 0.0, s2 = 0.0;
            for (double x : v)
            {
                s1 += x - v[0];
                s2 += (x - v[0]) * (x - v[0]);
            }
            const double n = static_cast<double>(v.size());
            return std::sqrt(std::max(0.0, (s2 - s1 * s1 / n) / (n - 1.0)));
        }

        double median_of(std::vector<double> v)
        {
            if (v.empty())
                return std::numeric_limits<double>::quiet_NaN();
            const std::size_t h = v.size() / 2;
            std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h), v.end());
            if (v.size() % 2 == 1)
                return v[h];
            const double upper = v[h];
            const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h));
            return 0.5 * (lower + upper);
        }
    } // namespace

    std::vector<ExtractedTap> extract_taps(std::span<const double> h_mag, double sample_rate, std::size_t period,
                                           const RadioParams &params, double threshold_db, std::size_t offset)
    {
        if (period == 0 || offset + period > h_mag.size())
            throw std::invalid_argument("extract_taps: |h| must cover one code period from the offset.");
        if (!(sample_rate > 0.0))
            throw std::invalid_argument("extract_taps: sample rate must be positive.");
        std::vector<double> p(period), scratch;
        for (std::size_t i = 0; i < period; ++i)
            p[i] = h_mag[offset + i] * h_mag[offset + i];
        const auto scan = scan_frame(p, threshold_db, scratch);
        if (!scan.valid)
            throw NoSignalError("no signal detected");
        std::vector<ExtractedTap> taps;
        for (auto off : scan.offsets)
        {
            const std::size_t idx = (scan.anchor + off) % period;
            taps.push_back({static_cast<double>(off) / sample_rate, path_gain_db(h_mag[offset + idx], params), idx});
        }
        return taps;
    }

    SoundingResult sound_link(const EmulationSession &session, int tx, int rx, const SoundingConfig &config,
                              Diagnostics *diag)
    {
        config.validate();
        session.validate(diag);
        if (std::abs(session.sample_rate - config.sample_rate) > 1e-9 * config.sample_rate)
            throw std::invalid_argument("sound_link: sounding and session sample rates differ.");
        if (tx == rx)
            throw std::invalid_argument("sound_link: tx and rx must differ.");
        if (!session.active_nodes.contains(tx) || !session.active_nodes.contains(rx))
            throw std::invalid_argument("sound_link: link " + to_string(LinkId{tx, rx}) + " needs both nodes active.");

        const auto &radio = session.scenario->radio();
        const auto &timeline = session.scenario->link(tx, rx);
        const double sr = config.sample_rate;
        const std::size_t spc = config.samples_per_chip();
        const auto ref = reference(config.code, spc);
        const std::size_t L = ref.size();
        const auto reps = static_cast<std::size_t>(config.resolved_repetitions());
        const auto total_tx = static_cast<std::int64_t>(reps * L);
        const auto dmax = static_cast<std::int64_t>(
            std::llround(static_cast<double>(timeline.max_slot()) * session.scenario->metadata().grid.slot_width * sr));
        const double a_tx = db_to_amplitude(radio.tx_power_db + radio.tx_gain_db + config.tx_gain_db);
        const double a_rx = db_to_amplitude(radio.rx_gain_db + config.rx_gain_db);
        const double gain_offset = radio.tx_power_db + radio.tx_gain_db + radio.rx_gain_db;

        SoundingResult res;
        res.d_peak = static_cast<double>(L) / sr;
        res.frames = reps - 2;
        res.mean_cir.assign(L, 0.0);

        const std::size_t per_chunk = std::max<std::size_t>(1, config.chunk_samples / L);
        const std::size_t nfft = std::bit_ceil(2 * L);
        std::vector<cplx> ref_conj(nfft, cplx{});
        std::copy(ref.begin(), ref.end(), ref_conj.begin());
        ref_conj = dsp::fft(ref_conj);
        for (auto &v : ref_conj)
            v = std::conj(v);
        std::vector<std::size_t> candidates;
        std::vector<std::vector<double>> cand_gain;
        std::vector<std::size_t> cand_hits;
        std::vector<double> p(L), scratch;
        bool have_candidates = false;
        Diagnostics local;

        for (std::size_t j0 = 1; j0 + 1 < reps; j0 += per_chunk)
        {
            const std::size_t j1 = std::min(reps - 1, j0 + per_chunk);
            const auto s = static_cast<std::int64_t>(j0 * L);
            const auto e = static_cast<std::int64_t>(j1 * L + L);
            const std::int64_t start = s - dmax;

            std::vector<cplx> xs(static_cast<std::size_t>(e - start));
            for (std::int64_t m = start; m < e; ++m)
                if (m >= 0 && m < total_tx)
                    xs[static_cast<std::size_t>(m - start)] = a_tx * ref[static_cast<std::size_t>(m) % L];
            std::map<int, IqBlock> inputs;
            inputs.emplace(tx, IqBlock(std::move(xs), sr, static_cast<double>(start) / sr));
            const auto y = superimpose(rx, inputs, session, &local);

            std::vector<cplx> region(static_cast<std::size_t>(e - s));
            for (std::size_t i = 0; i < region.size(); ++i)
                region[i] = a_rx * y[static_cast<std::size_t>(dmax) + i];
            // Each frame is correlated on its own two-period window so that
            // identical received periods give bit-identical estimates.
            std::vector<cplx> chi((j1 - j0) * L);
            for (std::size_t f = 0; f < j1 - j0; ++f)
            {
                std::vector<cplx> w(nfft, cplx{});
                std::copy_n(region.begin() + static_cast<std::ptrdiff_t>(f * L), 2 * L, w.begin());
                auto wf = dsp::fft(w);
                for (std::size_t i = 0; i < nfft; ++i)
                    wf[i] *= ref_conj[i];
                const auto c = dsp::ifft(wf);
                for (std::size_t k = 0; k < L; ++k)
                    chi[f * L + k] = c[k] / static_cast<double>(nfft);
            }

            const std::size_t n = j1 - j0;
            std::vector<FrameScan> scans(n);
            std::vector<std::vector<double>> powers(n, std::vector<double>(L));
            for (std::size_t f = 0; f < n; ++f)
            {
                for (std::size_t k = 0; k < L; ++k)
                {
                    const cplx h = chi[f * L + k] / static_cast<double>(L);
                    powers[f][k] = std::norm(h);
                    res.mean_cir[k] += std::abs(h);
                }
                scans[f] = scan_frame(powers[f], config.threshold_db, scratch);
                if (res.cir_frames.size() < config.keep_frames)
                {
                    std::vector<double> mag(L);
                    for (std::size_t k = 0; k < L; ++k)
                        mag[k] = std::sqrt(powers[f][k]);
                    res.cir_frames.push_back(std::move(mag));
                }
            }

            if (!have_candidates)
            {
                // Pilot: offsets seen in at least half of the first valid frames.
                std::map<std::size_t, std::size_t> hits;
                std::size_t pilot_valid = 0;
                for (std::size_t f = 0; f < std::min<std::size_t>(n, 64); ++f)
                    if (scans[f].valid)
                    {
                        ++pilot_valid;
                        for (auto off : scans[f].offsets)
                            ++hits[off];
                    }
                if (pilot_valid > 0)
                {
                    for (const auto &[off, c] : hits)
                        if (2 * c >= pilot_valid)
                            candidates.push_back(off);
                    cand_gain.resize(candidates.size());
                    cand_hits.assign(candidates.size(), 0);
                    have_candidates = true;
                }
            }

            for (std::size_t f = 0; f < n; ++f)
            {
                const auto &sc = scans[f];
                if (!sc.valid)
                    continue;
                ++res.valid_frames;
                auto gain_at = [&](std::size_t idx)
                { return std::max(kPathGainFloorDb, 10.0 * std::log10(std::max(powers[f][idx], 1e-300)) - gain_offset); };
                res.strongest_gain_db.push_back(gain_at(sc.anchor));
                for (std::size_t c = 0; c < candidates.size(); ++c)
                {
                    cand_gain[c].push_back(gain_at((sc.anchor + candidates[c]) % L));
                    if (std::binary_search(sc.offsets.begin(), sc.offsets.end(), candidates[c]))
                        ++cand_hits[c];
                }
            }
        }
        if (!local.warnings.empty())
            warn(diag, local.warnings.front());

        if (2 * res.valid_frames <= res.frames)
            throw NoSignalError("no signal detected on link " + to_string(LinkId{tx, rx}) + " (" +
                                std::to_string(res.valid_frames) + " of " + std::to_string(res.frames) +
                                " frames above threshold)");

        for (auto &v : res.mean_cir)
            v /= static_cast<double>(res.frames);
        res.path_loss_db = -mean_of(res.strongest_gain_db);
        res.path_loss_sd_db = sd_of(res.strongest_gain_db);
        for (std::size_t c = 0; c < candidates.size(); ++c)
        {
            SoundedTap t;
            t.offset = candidates[c];
            t.toa = static_cast<double>(candidates[c]) / sr;
            t.detection_rate = static_cast<double>(cand_hits[c]) / static_cast<double>(res.valid_frames);
            if (t.detection_rate < 0.5)
                continue;
            t.gain_db = median_of(cand_gain[c]);
            t.mean_db = mean_of(cand_gain[c]);
            t.sd_db = sd_of(cand_gain[c]);
            res.taps.push_back(t);
        }
        return res;
    }

    double LossMatrix::mean_loss() const
    {
        double s = 0.0;
        std::size_t n = 0;
        for (const auto &row : loss_db)
            for (double v : row)
                if (std::isfinite(v))
                {
                    s += v;
                    ++n;
                }
        return n ? s / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
    }

    std::size_t LossMatrix::detected() const
    {
        std::size_t n = 0;
        for (const auto &row : loss_db)
            for (double v : row)
                n += std::isfinite(v) ? 1 : 0;
        return n;
    }

    LossMatrix sound_matrix(const EmulationSession &session, const SoundingConfig &config, unsigned threads,
                            Diagnostics *diag)
    {
        session.validate(diag);
        LossMatrix m;
        m.node_ids.assign(session.active_nodes.begin(), session.active_nodes.end());
        const std::size_t n = m.node_ids.size();
        const double nan = std::numeric_limits<double>::quiet_NaN();
        m.loss_db.assign(n, std::vector<double>(n, nan));
        m.sd_db.assign(n, std::vector<double>(n, nan));
        m.no_signal.assign(n, std::vector<bool>(n, false));

        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j)
                    pairs.emplace_back(i, j);

        EmulationSession inner = session;
        inner.threads = 1;
        std::vector<Diagnostics> link_diag(pairs.size());
        std::vector<SoundingResult> results(pairs.size());
        std::vector<char> lost(pairs.size(), 0);
        parallel_for(pairs.size(), resolve_thread_count(threads),
                     [&](std::size_t k)
                     {
                         try
                         {
                             results[k] = sound_link(inner, m.node_ids[pairs[k].first], m.node_ids[pairs[k].second],
                                                     config, &link_diag[k]);
                         }
                         catch (const NoSignalError &)
                         {
                             lost[k] = 1;
                         }
                     });
        for (std::size_t k = 0; k < pairs.size(); ++k)
        {
            const auto [i, j] = pairs[k];
            if (lost[k])
                m.no_signal[i][j] = true;
            else
            {
                m.loss_db[i][j] = results[k].path_loss_db;
                m.sd_db[i][j] = results[k].path_loss_sd_db;
            }
            for (auto &w : link_diag[k].warnings)
                warn(diag, std::move(w));
        }
        return m;
    }

    void write_loss_matrix_csv(std::ostream &out, const LossMatrix &m)
    {
        out << "tx\\rx";
        for (int id : m.node_ids)
            out << ',' << id;
        out << '\n' << std::setprecision(10);
        for (std::size_t i = 0; i < m.node_ids.size(); ++i)
        {
            out << m.node_ids[i];
            for (std::size_t j = 0; j < m.node_ids.size(); ++j)
            {
                out << ',';
                if (i == j)
                    continue;
                if (m.no_signal[i][j])
                    out << "no_signal";
                else
                    out << m.loss_db[i][j];
            }
            out << '\n';
        }
    }

} // namespace twinchan
