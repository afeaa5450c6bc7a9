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

#include "twinchan/experiments.hpp"
#include "twinchan/scenario_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <iomanip>
#include <sstream>

namespace twinchan
{
    namespace
    {
        std::string fmt(double v, int precision = 4)
        {
            std::ostringstream os;
            os.setf(std::ios::fixed);
            os.precision(precision);
            os << v;
            return os.str();
        }

        std::string sci(double v)
        {
            std::ostringstream os;
            os << std::scientific << std::setprecision(2) << v;
            return os.str();
        }

        // Runs body and, when budget_s > 0, adds a wall-clock check against it.
        template <typename F>
        ExperimentReport timed(const std::string &id, double budget_s, F &&body)
        {
            ExperimentReport r;
            r.id = id;
            const auto t0 = std::chrono::steady_clock::now();
            body(r);
            r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            r.data["seconds"] = r.seconds;
            if (budget_s > 0.0)
                r.add("runtime < " + fmt(budget_s, 0) + " s", r.seconds < budget_s, fmt(r.seconds, 2) + " s");
            return r;
        }

        EmulationSession make_session(std::shared_ptr<const Scenario> sc, double rate, std::uint64_t seed, bool noise,
                                      unsigned threads)
        {
            EmulationSession s;
            for (int id : sc->node_ids())
                s.active_nodes.insert(id);
            s.scenario = std::move(sc);
            s.sample_rate = rate;
            s.rng_seed = seed;
            s.noise_enabled = noise;
            s.loop_timeline = true;
            s.threads = threads;
            return s;
        }

        std::vector<std::size_t> peaks_above(std::span<const double> m, double fraction)
        {
            const double top = *std::max_element(m.begin(), m.end());
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < m.size(); ++i)
            {
                const double prev = i > 0 ? m[i - 1] : 0.0, next = i + 1 < m.size() ? m[i + 1] : 0.0;
                if (m[i] >= fraction * top && m[i] > prev && m[i] >= next)
                    idx.push_back(i);
            }
            return idx;
        }

        std::vector<Tap> random_taps(std::mt19937_64 &rng, int max_slot)
        {
            std::uniform_int_distribution<int> count(1, kMaxActiveTaps), slot(0, max_slot);
            std::normal_distribution<double> g(0.0, 0.5);
            std::set<int> slots;
            const int n = count(rng);
            while (static_cast<int>(slots.size()) < n)
                slots.insert(slot(rng));
            std::vector<Tap> taps;
            for (int s : slots)
                taps.push_back({s, {g(rng), g(rng)}});
            return taps;
        }

        std::vector<cplx> random_signal(std::mt19937_64 &rng, std::size_t n)
        {
            std::normal_distribution<double> g(0.0, 1.0);
            std::vector<cplx> x(n);
            for (auto &v : x)
                v = {g(rng), g(rng)};
            return x;
        }
    } // namespace

    bool ExperimentReport::passed() const
    {
        return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check &c) { return c.pass; });
    }

    void ExperimentReport::add(std::string name, bool pass, std::string detail)
    {
        checks.push_back({std::move(name), pass, std::move(detail)});
    }

    std::vector<std::string> experiment_ids()
    {
        return {"seq-tuning", "dpeak", "base-loss", "multitap", "tap-stability", "jam-static", "jam-mobile",
                "similarity", "properties"};
    }

    std::shared_ptr<const Scenario> flat_scenario(int nodes, const RadioParams &radio, double duration_s,
                                                  double link_gain_db)
    {
        if (nodes < 2)
            throw std::invalid_argument("flat_scenario: at least two nodes.");
        std::vector<Node> ns;
        for (int i = 1; i <= nodes; ++i)
            ns.push_back({i, NodeKind::Static, {10.0 * i, 0.0, 1.0}, 0.0, {}});
        const auto frames = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(duration_s / kDefaultUpdateInterval)));
        CirTimeline tl;
        tl.frames.assign(frames, TapSet({{0, db_to_amplitude(link_gain_db)}}));
        tl.propagation_delays.assign(frames, 0.0);
        std::map<LinkId, CirTimeline> links;
        for (int a = 1; a <= nodes; ++a)
            for (int b = 1; b <= nodes; ++b)
                if (a != b)
                    links.emplace(LinkId{a, b}, tl);
        ScenarioMetadata meta;
        meta.name = "flat";
        return std::make_shared<const Scenario>(std::move(ns), radio, 1.0, std::move(links), std::move(meta));
    }

    std::shared_ptr<const Scenario> four_tap_scenario(const std::filesystem::path &data_dir)
    {
        const auto rays_path = data_dir / "fixtures" / "fourtap_rays.csv";
        const auto nodes_path = data_dir / "fixtures" / "fourtap_nodes.json";
        std::ifstream rays(rays_path), nodes(nodes_path);
        if (!rays || !nodes)
            throw std::invalid_argument("Four-tap fixture not found under " + data_dir.string() + ".");
        const auto nf = read_nodes_json(nodes);
        const auto raw = parse_ray_paths(read_ray_path_csv(rays));
        BuildOptions opts;
        opts.name = nf.name;
        return std::make_shared<const Scenario>(build_scenario(nf.nodes, nf.radio, raw, nf.sampling_interval, opts));
    }

    // ---------- sequences ----------

    ExperimentReport run_seq_tuning(const ExperimentOptions &)
    {
        return timed("seq-tuning", 0.0,
                     [](ExperimentReport &r)
                     {
                         const std::vector<std::string> specs{"glfsr:8:0:1", "gold:0x43:0x67:0", "golay:a128", "ls:256"};
                         std::vector<std::pair<double, std::string>> ranking;
                         for (const auto &spec : specs)
                         {
                             const auto code = seq::parse_code_spec(spec);
                             const auto m = seq::merit_report(code);
                             ranking.emplace_back(m.peak_to_sidelobe_db, spec);
                             r.data["merit"][spec] = {{"length", code.size()},
                                                      {"peak", m.peak},
                                                      {"max_off_peak_abs", m.max_off_peak_abs},
                                                      {"peak_to_sidelobe_db", m.peak_to_sidelobe_db}};
                         }
                         std::stable_sort(ranking.begin(), ranking.end(),
                                          [](const auto &a, const auto &b) { return a.first > b.first; });
                         std::vector<std::string> order;
                         for (const auto &[v, s] : ranking)
                             order.push_back(s);
                         r.data["ranking"] = order;
                         r.add("GLFSR-255 ranks first by peak-to-sidelobe", order.front() == "glfsr:8:0:1",
                               "ranking: " + order[0] + " > " + order[1] + " > " + order[2] + " > " + order[3]);

                         // Direct O(N^2) check, independent of periodic_autocorrelation.
                         const auto g = seq::gen_glfsr(8, 0, 1);
                         const auto c = g.chips();
                         long long worst = 0, peak = 0;
                         for (std::size_t k = 0; k < c.size(); ++k)
                         {
                             long long s = 0;
                             for (std::size_t n = 0; n < c.size(); ++n)
                                 s += c[n] * c[(n + k) % c.size()];
                             if (k == 0)
                                 peak = s;
                             else
                                 worst = std::max(worst, std::abs(s));
                         }
                         r.add("GLFSR-255 max off-peak |acf| = 1", peak == 255 && worst == 1,
                               "peak " + std::to_string(peak) + ", max off-peak " + std::to_string(worst));

                         const auto a = seq::gen_golay_a128(), b = seq::gen_golay_b128();
                         const auto ra = seq::aperiodic_autocorrelation(a.chips());
                         const auto rb = seq::aperiodic_autocorrelation(b.chips());
                         bool ok = ra[0] + rb[0] == 256;
                         for (std::size_t k = 1; k < ra.size(); ++k)
                             ok = ok && ra[k] + rb[k] == 0;
                         r.add("Ga128/Gb128 complementary (exact)", ok, "sum at lag 0 = " + std::to_string(ra[0] + rb[0]));
                     });
    }

    ExperimentReport run_dpeak(const ExperimentOptions &opts)
    {
        return timed("dpeak", 10.0,
                     [&](ExperimentReport &r)
                     {
                         RadioParams radio;
                         const double rate = 1.0e6;
                         auto sc = flat_scenario(2, radio, 0.01);
                         const auto session = make_session(sc, rate, opts.seed, true, opts.threads);
                         for (const std::string spec : {"glfsr:8:0:1", "golay:a128"})
                         {
                             const auto code = seq::parse_code_spec(spec);
                             const int reps = 12;
                             auto tx = bpsk_modulate(code, reps, rate, rate);
                             std::map<int, IqBlock> in;
                             in.emplace(1, std::move(tx));
                             const auto rx = superimpose(2, in, session);
                             const auto h = estimate_cir(rx, code, 1);
                             const auto mag = cir_magnitude(h.h_i, h.h_q);
                             const auto pk = peaks_above(mag, 0.5);
                             const double expected_us = static_cast<double>(code.size()) / rate * 1e6;
                             double worst = 0.0;
                             for (std::size_t i = 1; i < pk.size(); ++i)
                                 worst = std::max(worst, std::abs(static_cast<double>(pk[i] - pk[i - 1]) -
                                                                  static_cast<double>(code.size())));
                             SoundingConfig cfg;
                             cfg.code = code;
                             cfg.sample_rate = rate;
                             cfg.capture_duration = reps * expected_us * 1e-6;
                             const auto res = sound_link(session, 1, 2, cfg);
                             r.data[spec] = {{"peaks", pk.size()}, {"max_spacing_error_samples", worst},
                                             {"d_peak_us", res.d_peak * 1e6}};
                             r.add(spec + " peaks every " + fmt(expected_us, 0) + " us",
                                   pk.size() >= 3 && worst <= 1.0 && std::abs(res.d_peak * 1e6 - expected_us) < 1e-9,
                                   std::to_string(pk.size()) + " peaks, max spacing error " + fmt(worst, 0) +
                                       " samples, d_peak " + fmt(res.d_peak * 1e6, 3) + " us");
                         }
                     });
    }

    ExperimentReport run_base_loss(const ExperimentOptions &opts)
    {
        return timed("base-loss", 120.0,
                     [&](ExperimentReport &r)
                     {
                         RadioParams radio; // base loss 57.55 dB, noise floor -100 dB
                         const double rate = 1.0e6;
                         SoundingConfig cfg;
                         cfg.sample_rate = rate;
                         cfg.capture_duration = opts.base_loss_capture_s;
                         cfg.keep_frames = 0;

                         auto sc = flat_scenario(10, radio, 0.001);
                         const auto m = sound_matrix(make_session(sc, rate, opts.seed, true, 1), cfg, opts.threads);
                         const double mean = m.mean_loss();
                         double lo = 1e300, hi = -1e300;
                         for (std::size_t i = 0; i < m.node_ids.size(); ++i)
                             for (std::size_t j = 0; j < m.node_ids.size(); ++j)
                                 if (std::isfinite(m.loss_db[i][j]))
                                 {
                                     lo = std::min(lo, m.loss_db[i][j]);
                                     hi = std::max(hi, m.loss_db[i][j]);
                                 }
                         r.data["matrix_mean_db"] = mean;
                         r.data["matrix_min_db"] = lo;
                         r.data["matrix_max_db"] = hi;
                         r.data["links_detected"] = m.detected();
                         r.add("10-node mean loss = 57.55 dB +- 0.05",
                               m.detected() == 90 && std::abs(mean - radio.base_loss_db) <= 0.05,
                               "mean " + fmt(mean) + " dB over " + std::to_string(m.detected()) + " links (range " +
                                   fmt(lo, 3) + " .. " + fmt(hi, 3) + ")");

                         // Same matrix with noise off: only arithmetic error remains.
                         SoundingConfig quiet = cfg;
                         quiet.capture_duration = 0.05;
                         const auto q = sound_matrix(make_session(sc, rate, opts.seed, false, 1), quiet, opts.threads);
                         r.data["noise_off_mean_db"] = q.mean_loss();
                         r.add("noise off: mean loss within 0.01 dB",
                               q.detected() == 90 && std::abs(q.mean_loss() - radio.base_loss_db) <= 0.01,
                               "mean " + fmt(q.mean_loss(), 6) + " dB");

                         // Links pushed past the dynamic range.
                         for (double extra : {45.0, 60.0})
                         {
                             auto weak = flat_scenario(2, radio, 0.001, -extra);
                             std::string outcome;
                             bool ok = false;
                             try
                             {
                                 const auto res =
                                     sound_link(make_session(weak, rate, opts.seed, true, 1), 1, 2, cfg);
                                 outcome = "loss " + fmt(res.path_loss_db, 2) + " dB";
                                 ok = res.path_loss_db >= 99.0;
                             }
                             catch (const NoSignalError &)
                             {
                                 outcome = "no signal detected";
                                 ok = true;
                             }
                             r.data["attenuated_" + fmt(extra, 0)] = outcome;
                             r.add("link at -" + fmt(extra, 0) + " dB saturates", ok, outcome);
                         }
                     });
    }

    ExperimentReport run_multitap(const ExperimentOptions &opts)
    {
        return timed("multitap", 30.0,
                     [&](ExperimentReport &r)
                     {
                         auto sc = four_tap_scenario(opts.data_dir);
                         const double rate = 50.0e6;
                         SoundingConfig cfg;
                         cfg.sample_rate = rate;
                         cfg.capture_duration = opts.multitap_capture_s;
                         Diagnostics diag;
                         const auto res = sound_link(make_session(sc, rate, opts.seed, true, opts.threads), 1, 2, cfg, &diag);
                         const double base = sc->radio().base_loss_db;
                         const std::vector<double> toa_us{0.0, 1.28, 2.0, 4.0}, gain_db{-3.0, -20.0, -15.0, -8.0};
                         r.data["frames"] = res.frames;
                         nlohmann::json taps = nlohmann::json::array();
                         for (const auto &t : res.taps)
                             taps.push_back({{"toa_us", t.toa * 1e6}, {"gain_db", t.gain_db + base}, {"sd_db", t.sd_db}});
                         r.data["taps"] = taps;
                         r.add("four taps recovered", res.taps.size() == 4,
                               std::to_string(res.taps.size()) + " taps above threshold");
                         for (std::size_t i = 0; i < toa_us.size(); ++i)
                         {
                             const SoundedTap *best = nullptr;
                             for (const auto &t : res.taps)
                                 if (!best || std::abs(t.toa * 1e6 - toa_us[i]) < std::abs(best->toa * 1e6 - toa_us[i]))
                                     best = &t;
                             if (!best)
                             {
                                 r.add("tap " + fmt(toa_us[i], 2) + " us", false, "missing");
                                 continue;
                             }
                             const double dt_ns = (best->toa * 1e6 - toa_us[i]) * 1e3;
                             const double dg = best->gain_db + base - gain_db[i];
                             r.add("tap " + fmt(toa_us[i], 2) + " us / " + fmt(gain_db[i], 0) + " dB",
                                   std::abs(dt_ns) <= 20.0 && std::abs(dg) <= 0.5,
                                   "toa error " + fmt(dt_ns, 1) + " ns, gain error " + fmt(dg, 3) + " dB");
                         }
                         r.data["warnings"] = diag.warnings;
                     });
    }

    ExperimentReport run_tap_stability(const ExperimentOptions &opts)
    {
        return timed("tap-stability", 120.0,
                     [&](ExperimentReport &r)
                     {
                         auto sc = four_tap_scenario(opts.data_dir);
                         const double rate = 50.0e6;
                         SoundingConfig cfg;
                         cfg.sample_rate = rate;
                         cfg.repetitions = opts.stability_frames + 2;
                         cfg.capture_duration =
                             static_cast<double>(cfg.repetitions) * static_cast<double>(cfg.period_samples()) / rate;
                         const auto noisy = sound_link(make_session(sc, rate, opts.seed, true, opts.threads), 1, 2, cfg);
                         const auto clean = sound_link(make_session(sc, rate, opts.seed, false, opts.threads), 1, 2, cfg);
                         if (noisy.taps.empty() || clean.taps.empty())
                         {
                             r.add("taps recovered", false, "no taps");
                             return;
                         }
                         auto by_gain = [](const SoundedTap &a, const SoundedTap &b) { return a.gain_db < b.gain_db; };
                         const auto strongest = *std::max_element(noisy.taps.begin(), noisy.taps.end(), by_gain);
                         const auto weakest = *std::min_element(noisy.taps.begin(), noisy.taps.end(), by_gain);
                         const auto clean_strongest = *std::max_element(clean.taps.begin(), clean.taps.end(), by_gain);
                         r.data["frames"] = noisy.valid_frames;
                         r.data["strongest_sd_db"] = strongest.sd_db;
                         r.data["weakest_sd_db"] = weakest.sd_db;
                         r.data["noise_off_strongest_sd_db"] = clean_strongest.sd_db;
                         r.add("frames sounded", noisy.valid_frames == static_cast<std::size_t>(opts.stability_frames),
                               std::to_string(noisy.valid_frames) + " valid frames");
                         r.add("strongest-tap SD <= 0.1 dB", strongest.sd_db <= 0.1, "SD " + fmt(strongest.sd_db) + " dB");
                         r.add("weak tap varies more than strong tap", strongest.sd_db < weakest.sd_db,
                               "strongest " + fmt(strongest.sd_db) + " dB < weakest " + fmt(weakest.sd_db) + " dB");
                         r.add("noise off: strongest-tap SD is exactly 0", clean_strongest.sd_db == 0.0,
                               "SD " + fmt(clean_strongest.sd_db, 6) + " dB");
                     });
    }

    ExperimentReport run_jam(const ExperimentOptions &opts, bool mobile)
    {
        return timed(mobile ? "jam-mobile" : "jam-static", 60.0,
                     [&](ExperimentReport &r)
                     {
                         std::map<std::string, JamResult> runs;
                         for (auto kind : {JammerKind::Narrowband, JammerKind::Wideband})
                         {
                             JamConfig cfg;
                             cfg.kind = kind;
                             cfg.mobile = mobile;
                             cfg.seed = opts.seed;
                             runs[to_string(kind)] = run_jam_demo(cfg, opts.threads);
                         }
                         const JamConfig ref;
                         // Tolerance band around the pre-jam baseline for "no drop".
                         const double band = 0.5;
                         for (const auto &[name, res] : runs)
                         {
                             const auto &v = res.sinr_db.values;
                             const double base = res.report.pre_mean;
                             bool outside_ok = true, inside_ok = true;
                             double worst_out = 0.0, least_in = 1e300;
                             for (std::size_t i = 0; i < v.size(); ++i)
                             {
                                 const double t = static_cast<double>(i) * res.sinr_db.period;
                                 const double drop = base - v[i];
                                 if (t >= ref.on_s && t < ref.off_s)
                                 {
                                     least_in = std::min(least_in, drop);
                                     inside_ok = inside_ok && drop > band;
                                 }
                                 else
                                 {
                                     worst_out = std::max(worst_out, std::abs(drop));
                                     outside_ok = outside_ok && std::abs(drop) <= band;
                                 }
                             }
                             r.data[name] = {{"pre_mean_db", base},
                                             {"during_mean_db", res.report.during_mean},
                                             {"drop_db", res.report.drop_db},
                                             {"sinr_db", v}};
                             r.add(name + " drop confined to [20 s, 40 s)", inside_ok && outside_ok,
                                   "smallest in-window drop " + fmt(least_in, 2) + " dB, largest out-of-window deviation " +
                                       fmt(worst_out, 2) + " dB");
                         }
                         const double nb = runs["narrowband"].report.drop_db, wb = runs["wideband"].report.drop_db;
                         r.add("wideband drop > narrowband drop", wb > nb,
                               "wideband " + fmt(wb, 2) + " dB vs narrowband " + fmt(nb, 2) + " dB");
                     });
    }

    std::vector<double> brute_force_xcorr(std::vector<double> x, std::vector<double> y, int max_lag)
    {
        const std::size_t n = std::max(x.size(), y.size());
        x.resize(n, 0.0);
        y.resize(n, 0.0);
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            mx += x[i] / static_cast<double>(n);
            my += y[i] / static_cast<double>(n);
        }
        double sxx = 0.0, syy = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            sxx += (x[i] - mx) * (x[i] - mx);
            syy += (y[i] - my) * (y[i] - my);
        }
        std::vector<double> rho;
        for (int k = -max_lag; k <= max_lag; ++k)
        {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
            {
                const long long j = static_cast<long long>(i) + k;
                if (j >= 0 && j < static_cast<long long>(n))
                    s += (x[i] - mx) * (y[static_cast<std::size_t>(j)] - my);
            }
            rho.push_back(s / std::sqrt(sxx * syy));
        }
        return rho;
    }

    ExperimentReport run_similarity(const ExperimentOptions &opts)
    {
        return timed("similarity", 0.0,
                     [&](ExperimentReport &r)
                     {
                         std::mt19937_64 rng(opts.seed);
                         std::uniform_int_distribution<int> len(2, 64);
                         std::normal_distribution<double> g(0.0, 1.0);
                         double worst = 0.0;
                         const int trials = 500;
                         for (int t = 0; t < trials; ++t)
                         {
                             MetricSeries x, y;
                             x.values.resize(static_cast<std::size_t>(len(rng)));
                             y.values.resize(static_cast<std::size_t>(len(rng)));
                             for (auto &v : x.values)
                                 v = g(rng);
                             for (auto &v : y.values)
                                 v = g(rng);
                             const int k = static_cast<int>(std::max(x.size(), y.size())) - 1;
                             const auto rep = normalized_xcorr(x, y, k);
                             const auto bf = brute_force_xcorr(x.values, y.values, k);
                             for (std::size_t i = 0; i < bf.size(); ++i)
                                 worst = std::max(worst, std::abs(bf[i] - rep.rho_by_lag[i]));
                         }
                         r.data["max_abs_error"] = worst;
                         r.add("matches brute force on random pairs (N <= 64, all lags)", worst <= 1e-12,
                               std::to_string(trials) + " pairs, max |error| " + sci(worst));

                         // Digitized static-jamming SINR traces (Arena vs Colosseum).
                         const std::vector<std::pair<std::string, double>> expected{{"narrowband", 0.986},
                                                                                    {"wideband", 0.984}};
                         for (const auto &[kind, target] : expected)
                         {
                             const auto dir = opts.data_dir / "traces";
                             const auto real = dir / ("jam_static_sinr_" + kind + "_arena.csv");
                             const auto twin = dir / ("jam_static_sinr_" + kind + "_colosseum.csv");
                             std::ifstream fr(real), ft(twin);
                             if (!fr || !ft)
                             {
                                 r.add("digitized static SINR trace, " + kind + ": score " + fmt(target, 3) + " +- 0.02",
                                       false, "fixture unavailable: " + real.filename().string() + " / " +
                                                  twin.filename().string() + " not shipped");
                                 continue;
                             }
                             const auto rep = compare_runs(read_metric_csv(fr, "arena"), read_metric_csv(ft, "colosseum"));
                             r.add("digitized static SINR trace, " + kind + ": score " + fmt(target, 3) + " +- 0.02",
                                   std::abs(rep.score - target) <= 0.02, "score " + fmt(rep.score, 3));
                         }
                     });
    }

    ExperimentReport run_properties(const ExperimentOptions &opts)
    {
        return timed("properties", 0.0,
                     [&](ExperimentReport &r)
                     {
                         std::mt19937_64 rng(opts.seed);
                         const double rate = 50.0e6;
                         const int trials = 20;

                         // Scenarios with random taps on every link and 1 ms frames.
                         auto random_scenario = [&](int nodes, int frames, bool static_channel)
                         {
                             std::vector<Node> ns;
                             for (int i = 1; i <= nodes; ++i)
                                 ns.push_back({i, NodeKind::Static, {double(i), 0.0, 1.0}, 0.0, {}});
                             std::map<LinkId, CirTimeline> links;
                             for (int a = 1; a <= nodes; ++a)
                                 for (int b = 1; b <= nodes; ++b)
                                     if (a != b)
                                     {
                                         CirTimeline tl;
                                         const TapSet first(random_taps(rng, 300));
                                         for (int f = 0; f < frames; ++f)
                                             tl.frames.push_back(static_channel || f == 0 ? first
                                                                                          : TapSet(random_taps(rng, 300)));
                                         links.emplace(LinkId{a, b}, std::move(tl));
                                     }
                             return std::make_shared<const Scenario>(std::move(ns), RadioParams{}, 1.0, std::move(links),
                                                                     ScenarioMetadata{});
                         };

                         double lin_err = 0.0;
                         bool superposition = true, collapse = true;
                         for (int t = 0; t < trials; ++t)
                         {
                             auto sc = random_scenario(3, 3, false);
                             auto session = make_session(sc, rate, opts.seed, false, opts.threads);
                             session.loop_timeline = false;
                             const std::size_t n = 100000 + static_cast<std::size_t>(rng() % 40000);
                             const double t0 = static_cast<double>(rng() % 1000) / rate;
                             const IqBlock x1(random_signal(rng, n), rate, t0), x2(random_signal(rng, n), rate, t0);

                             const double alpha = 0.37 + static_cast<double>(t);
                             std::vector<cplx> ax(x1.samples().begin(), x1.samples().end());
                             for (auto &v : ax)
                                 v *= alpha;
                             const auto y = superimpose(3, {{1, x1}}, session);
                             const auto ya = superimpose(3, {{1, IqBlock(ax, rate, t0)}}, session);
                             double peak = 0.0;
                             for (std::size_t i = 0; i < y.size(); ++i)
                                 peak = std::max(peak, std::abs(alpha * y[i]));
                             for (std::size_t i = 0; i < y.size(); ++i)
                                 lin_err = std::max(lin_err, std::abs(ya[i] - alpha * y[i]) / peak);

                             const auto y2 = superimpose(3, {{2, x2}}, session);
                             const auto joint = superimpose(3, {{1, x1}, {2, x2}}, session);
                             for (std::size_t i = 0; i < joint.size(); ++i)
                             {
                                 const cplx a = i < y.size() ? y[i] : cplx{}, b = i < y2.size() ? y2[i] : cplx{};
                                 superposition = superposition && joint[i] == a + b;
                             }

                             auto sc_static = random_scenario(2, 4, true);
                             const auto &tl = sc_static->link(1, 2);
                             const auto link = emulate_link(x1, tl);
                             const auto direct = fir_apply(x1, tl.frames[0]);
                             collapse = collapse && link.size() == direct.size() &&
                                        std::equal(link.samples().begin(), link.samples().end(), direct.samples().begin());
                         }
                         r.add("linearity (noise off)", lin_err <= 1e-12, "max relative error " + sci(lin_err));
                         r.add("superposition is sample-exact", superposition, superposition ? "bit-identical" : "mismatch");
                         r.add("time-invariant timeline equals single FIR", collapse, collapse ? "bit-identical" : "mismatch");

                         // <= 4 well-separated paths survive quantization up to slot rounding.
                         bool lossless = true, roundtrip = true;
                         double worst_delay = 0.0;
                         std::uniform_real_distribution<double> u(0.0, 1.0);
                         for (int t = 0; t < 200; ++t)
                         {
                             const int n = 1 + static_cast<int>(rng() % 4);
                             std::vector<RayPath> paths;
                             double toa = 1e-7 * u(rng);
                             for (int i = 0; i < n; ++i)
                             {
                                 paths.push_back({toa, std::polar(0.05 + u(rng), 6.283 * u(rng))});
                                 toa += 21e-9 + 1e-6 * u(rng);
                             }
                             const auto q = quantize_taps(RawCir(paths, 0.0));
                             lossless = lossless && q.taps.size() == paths.size();
                             for (std::size_t i = 0; lossless && i < paths.size(); ++i)
                             {
                                 const auto &tap = q.taps.taps()[i];
                                 lossless = tap.gain == paths[i].gain;
                                 const double err = std::abs(tap.delay_slot * kSlotWidth - (paths[i].toa - paths[0].toa));
                                 worst_delay = std::max(worst_delay, err);
                             }
                             roundtrip = roundtrip && decode_tapset(encode_tapset(q.taps)) == q.taps;
                         }
                         r.add("<= 4 separated paths quantize losslessly", lossless && worst_delay <= 5e-9 + 1e-15,
                               "gains exact, worst delay error " + fmt(worst_delay * 1e9, 3) + " ns");
                         r.add("TapSet serialization round-trips", roundtrip, roundtrip ? "bit-identical" : "mismatch");

                         // Fixed seeds give identical bytes regardless of worker count.
                         JamConfig jc;
                         jc.mobile = true;
                         jc.total_s = 5.0;
                         jc.on_s = 1.0;
                         jc.off_s = 3.0;
                         const auto raw = parse_ray_paths(jam_ray_paths(jc));
                         std::ostringstream b1, b3;
                         BuildOptions o1, o3;
                         o3.threads = 3;
                         write_scenario(b1, build_scenario(jam_nodes(jc), RadioParams{}, raw, jc.channel_sampling, o1));
                         write_scenario(b3, build_scenario(jam_nodes(jc), RadioParams{}, raw, jc.channel_sampling, o3));
                         const bool same_build = b1.str() == b3.str();

                         auto sc = four_tap_scenario(opts.data_dir);
                         SoundingConfig cfg;
                         cfg.sample_rate = rate;
                         cfg.repetitions = 200;
                         cfg.capture_duration = 1.0;
                         const auto s1 = sound_link(make_session(sc, rate, 42, true, 1), 1, 2, cfg);
                         const auto s2 = sound_link(make_session(sc, rate, 42, true, 3), 1, 2, cfg);
                         const bool same_sound = s1.strongest_gain_db == s2.strongest_gain_db && s1.mean_cir == s2.mean_cir;
                         const auto j1 = gen_jammer(JammerKind::Narrowband, 0.0, 0.0, 1e-3, 20e6, 9);
                         const auto j2 = gen_jammer(JammerKind::Narrowband, 0.0, 0.0, 1e-3, 20e6, 9);
                         const bool same_jam = std::equal(j1.samples().begin(), j1.samples().end(), j2.samples().begin());
                         const auto d1 = run_jam_demo(jc, 1), d3 = run_jam_demo(jc, 3);
                         bool same_demo = d1.sinr_db.values.size() == d3.sinr_db.values.size();
                         for (std::size_t i = 0; same_demo && i < d1.sinr_db.values.size(); ++i)
                             same_demo = d1.sinr_db.values[i] == d3.sinr_db.values[i];
                         r.add("determinism under fixed seeds", same_build && same_sound && same_jam && same_demo,
                               std::string("scenario bytes ") + (same_build ? "equal" : "differ") + ", sounding " +
                                   (same_sound ? "equal" : "differs") + ", jammer " + (same_jam ? "equal" : "differs") +
                                   ", jam demo " + (same_demo ? "equal" : "differs") + " (1 vs 3 workers)");
                     });
    }

    ExperimentReport run_experiment(const std::string &id, const ExperimentOptions &opts)
    {
        if (id == "seq-tuning")
            return run_seq_tuning(opts);
        if (id == "dpeak")
            return run_dpeak(opts);
        if (id == "base-loss")
            return run_base_loss(opts);
        if (id == "multitap")
            return run_multitap(opts);
        if (id == "tap-stability")
            return run_tap_stability(opts);
        if (id == "jam-static")
            return run_jam(opts, false);
        if (id == "jam-mobile")
            return run_jam(opts, true);
        if (id == "similarity")
            return run_similarity(opts);
        if (id == "properties")
            return run_properties(opts);
        std::string ids;
        for (const auto &e : experiment_ids())
            ids += (ids.empty() ? "" : ", ") + e;
        throw std::invalid_argument("Unknown experiment '" + id + "' (expected one of: " + ids + ").");
    }

} // namespace twinchan
