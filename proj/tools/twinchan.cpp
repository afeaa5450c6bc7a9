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

// twinchan command-line front end.

#include "twinchan/experiments.hpp"
#include "twinchan/plot.hpp"
#include "twinchan/scenario_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#ifndef TWINCHAN_VERSION
#define TWINCHAN_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace twinchan;

namespace
{
    // Exit codes.
    constexpr int kOk = 0;
    constexpr int kInternal = 1;
    constexpr int kInvalid = 2;

    std::string utc_now()
    {
        const auto now = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(now);
        std::tm tm{};
        gmtime_r(&t, &tm);
        std::ostringstream os;
        os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
        return os.str();
    }

    std::string sha256_file(const fs::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::invalid_argument("Cannot open " + path.string() + ".");
        EVP_MD_CTX *ctx = EVP_MD_CTX_new();
        if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1)
            throw std::runtime_error("SHA-256 unavailable.");
        std::vector<char> buf(1 << 16);
        while (in)
        {
            in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
            EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
        }
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx, md, &len);
        EVP_MD_CTX_free(ctx);
        std::ostringstream os;
        for (unsigned i = 0; i < len; ++i)
            os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
        return os.str();
    }

    std::ofstream open_out(const fs::path &path, bool binary = false)
    {
        if (path.has_parent_path())
            fs::create_directories(path.parent_path());
        std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
        if (!out)
            throw std::runtime_error("Cannot open " + path.string() + " for writing.");
        out.precision(17);
        return out;
    }

    // Option values as resolved after CLI, config file and defaults.
    json resolved_options(const CLI::App *app)
    {
        json j = json::object();
        for (const CLI::Option *opt : app->get_options())
        {
            const std::string name = opt->get_single_name();
            if (name.empty() || name == "help" || name == "config" || name == "version")
                continue;
            if (opt->get_expected_max() == 0) // flag
            {
                j[name] = opt->count() > 0;
                continue;
            }
            const auto &res = opt->results();
            if (res.empty())
                j[name] = opt->get_default_str();
            else if (res.size() == 1)
                j[name] = res.front();
            else
                j[name] = res;
        }
        return j;
    }

    struct Run
    {
        std::vector<std::string> argv;
        std::string started = utc_now();
        const CLI::App *root = nullptr;
        const CLI::App *leaf = nullptr;
        std::string command;
        std::vector<fs::path> inputs;
        std::uint64_t seed = 1;
        unsigned threads = 1;

        // <primary output>.manifest.json, listing every artifact produced.
        void manifest(const fs::path &primary, const std::vector<fs::path> &outputs, const json &extra = {}) const
        {
            json m;
            m["tool"] = "twinchan";
            m["version"] = TWINCHAN_VERSION;
            m["command"] = command;
            m["argv"] = argv;
            json cfg = resolved_options(root);
            for (const CLI::App *a = leaf; a && a != root; a = a->get_parent())
                cfg[a->get_name()] = resolved_options(a);
            cfg["threads_resolved"] = threads;
            m["config"] = cfg;
            m["seeds"] = {{"seed", seed}};
            json in = json::array();
            for (const auto &p : inputs)
                in.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
            m["inputs"] = in;
            json out = json::array();
            for (const auto &p : outputs)
                out.push_back(p.string());
            m["outputs"] = out;
            if (!extra.is_null())
                m["result"] = extra;
            m["started_utc"] = started;
            m["finished_utc"] = utc_now();
            auto f = open_out(fs::path(primary.string() + ".manifest.json"));
            f << m.dump(2) << "\n";
        }
    };

    json sounding_json(const SoundingResult &r, const RadioParams &radio)
    {
        json taps = json::array();
        for (const auto &t : r.taps)
            taps.push_back({{"toa_us", t.toa * 1e6},
                            {"gain_db", t.gain_db},
                            {"gain_plus_base_loss_db", t.gain_db + radio.base_loss_db},
                            {"mean_db", t.mean_db},
                            {"sd_db", t.sd_db},
                            {"detection_rate", t.detection_rate}});
        return {{"taps", taps},
                {"path_loss_db", r.path_loss_db},
                {"path_loss_sd_db", r.path_loss_sd_db},
                {"d_peak_us", r.d_peak * 1e6},
                {"frames", r.frames},
                {"valid_frames", r.valid_frames}};
    }

    json nan_to_null(const std::vector<double> &v)
    {
        json a = json::array();
        for (double x : v)
            a.push_back(std::isfinite(x) ? json(x) : json(nullptr));
        return a;
    }

    void print_report(const ExperimentReport &r)
    {
        std::cout << r.id << "  (" << std::fixed << std::setprecision(2) << r.seconds << " s)\n";
        for (const auto &c : r.checks)
            std::cout << "  " << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  [" << c.detail << "]\n";
        std::cout << (r.passed() ? "PASS " : "FAIL ") << r.id << "\n";
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"twinchan: software twin of an FPGA channel emulator and its sounding toolchain"};
    app.set_version_flag("--version", TWINCHAN_VERSION);
    app.set_config("--config", "", "TOML/INI config file; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();

    Run run;
    run.argv.assign(argv, argv + argc);
    run.root = &app;
    unsigned threads_opt = 0;
    app.add_option("--threads", threads_opt, "Worker cap (0: TWINCHAN_THREADS or all cores)")->capture_default_str();

    // ---------- seq ----------
    auto *seq_cmd = app.add_subcommand("seq", "Sounding code generation and merit figures");
    seq_cmd->require_subcommand(1);

    auto *seq_gen = seq_cmd->add_subcommand("gen", "Write chips as text (one per line) and as a signed byte stream");
    std::string family = "glfsr", code_spec;
    int degree = 8, shift = 0, length = 128;
    std::string mask = "0", poly_a = "0x43", poly_b = "0x67", golay_which = "a";
    std::uint64_t lfsr_seed = 1;
    fs::path seq_out;
    seq_gen->add_option("--code", code_spec, "Code spec, e.g. glfsr:8:0:1 (overrides --family)");
    seq_gen->add_option("--family", family, "glfsr | gold | golay | ls")
        ->check(CLI::IsMember({"glfsr", "gold", "golay", "ls"}))
        ->capture_default_str();
    seq_gen->add_option("--degree", degree, "GLFSR degree")->capture_default_str();
    seq_gen->add_option("--mask", mask, "GLFSR output mask")->capture_default_str();
    seq_gen->add_option("--seed", lfsr_seed, "GLFSR initial state")->capture_default_str();
    seq_gen->add_option("--poly-a", poly_a, "Gold polynomial A (bitmask)")->capture_default_str();
    seq_gen->add_option("--poly-b", poly_b, "Gold polynomial B (bitmask)")->capture_default_str();
    seq_gen->add_option("--shift", shift, "Gold relative shift")->capture_default_str();
    seq_gen->add_option("--which", golay_which, "Golay member a | b")->check(CLI::IsMember({"a", "b"}))->capture_default_str();
    seq_gen->add_option("--length", length, "Golay or LS length")->capture_default_str();
    seq_gen->add_option("-o,--output", seq_out, "Output prefix (writes .txt and .bin)")->required();

    auto *seq_report = seq_cmd->add_subcommand("report", "Periodic autocorrelation merit for one or more codes");
    std::vector<std::string> report_codes{"glfsr:8:0:1", "gold:0x43:0x67:0", "golay:a128", "ls:256"};
    fs::path report_out;
    seq_report->add_option("--code", report_codes, "Code specs")->capture_default_str();
    seq_report->add_option("-o,--output", report_out, "JSON output (default stdout)");

    // ---------- scenario ----------
    auto *sc_cmd = app.add_subcommand("scenario", "Compile, inspect and summarize scenario bundles");
    sc_cmd->require_subcommand(1);

    auto *sc_build = sc_cmd->add_subcommand("build", "Compile ray-path CSV + node JSON into a bundle");
    fs::path paths_csv, nodes_json, bundle_out;
    double update_interval = kDefaultUpdateInterval;
    sc_build->add_option("--paths", paths_csv, "Ray-path CSV")->required()->check(CLI::ExistingFile);
    sc_build->add_option("--nodes", nodes_json, "Node/radio JSON")->required()->check(CLI::ExistingFile);
    sc_build->add_option("--update-interval", update_interval, "FIR update interval (s)")->capture_default_str();
    sc_build->add_option("-o,--output", bundle_out, "Bundle path (.twsc)")->required();

    auto *sc_inspect = sc_cmd->add_subcommand("inspect", "Print a bundle's header as JSON");
    fs::path inspect_in;
    sc_inspect->add_option("bundle", inspect_in, "Bundle path")->required()->check(CLI::ExistingFile);

    auto *sc_heat = sc_cmd->add_subcommand("heatmap", "Path-loss matrix of one frame as CSV");
    fs::path heat_in, heat_out;
    std::size_t heat_frame = 0;
    sc_heat->add_option("bundle", heat_in, "Bundle path")->required()->check(CLI::ExistingFile);
    sc_heat->add_option("--frame", heat_frame, "Frame index")->capture_default_str();
    sc_heat->add_option("-o,--output", heat_out, "CSV output (default stdout)");

    // ---------- sound ----------
    auto *snd_cmd = app.add_subcommand("sound", "Channel sounding through the emulator");
    snd_cmd->require_subcommand(1);
    std::string snd_code = "glfsr:8:0:1";
    double snd_rate = 1.0e6, snd_duration = 3.0, snd_chip_rate = 0.0, snd_threshold = 12.0;
    int snd_reps = 0;
    std::uint64_t snd_seed = 1;
    bool snd_no_noise = false, snd_loop = false;
    fs::path snd_scenario;
    auto add_sound_opts = [&](CLI::App *c)
    {
        c->add_option("--scenario", snd_scenario, "Scenario bundle")->required()->check(CLI::ExistingFile);
        c->add_option("--code", snd_code, "Code spec")->capture_default_str();
        c->add_option("--rate", snd_rate, "Sample rate (S/s)")->capture_default_str();
        c->add_option("--duration", snd_duration, "Capture duration (s)")->capture_default_str();
        c->add_option("--repetitions", snd_reps, "Code periods (0: fill the duration)")->capture_default_str();
        c->add_option("--chip-rate", snd_chip_rate, "Chip rate (0: one sample per chip)")->capture_default_str();
        c->add_option("--threshold", snd_threshold, "Tap threshold above the median (dB)")->capture_default_str();
        c->add_option("--seed", snd_seed, "Noise seed")->capture_default_str();
        c->add_flag("--no-noise", snd_no_noise, "Disable receiver noise");
        c->add_flag("--loop", snd_loop, "Wrap the channel timeline (automatic for static scenarios)");
    };

    auto *snd_run = snd_cmd->add_subcommand("run", "Sound one link");
    int snd_tx = 1, snd_rx = 2;
    fs::path snd_out, snd_svg;
    add_sound_opts(snd_run);
    snd_run->add_option("--tx", snd_tx, "Transmitter node id")->capture_default_str();
    snd_run->add_option("--rx", snd_rx, "Receiver node id")->capture_default_str();
    snd_run->add_option("-o,--output", snd_out, "JSON result; |h| trace goes to <stem>.cir.csv")->required();
    snd_run->add_option("--svg", snd_svg, "Optional SVG plot of the mean |h| trace");

    auto *snd_matrix = snd_cmd->add_subcommand("matrix", "Sound every ordered link into a loss matrix");
    fs::path matrix_out;
    add_sound_opts(snd_matrix);
    snd_matrix->add_option("-o,--output", matrix_out, "CSV output")->required();

    // ---------- jam ----------
    auto *jam_cmd = app.add_subcommand("jam", "Wi-Fi proxy vs jammer SINR time series");
    JamConfig jc;
    std::string jam_kind = "wideband";
    fs::path jam_out, jam_svg;
    jam_cmd->add_option("--kind", jam_kind, "narrowband | wideband")
        ->check(CLI::IsMember({"narrowband", "wideband"}))
        ->capture_default_str();
    jam_cmd->add_option("--bandwidth", jc.bandwidth_hz, "Jammer bandwidth (Hz, 0: kind default)")->capture_default_str();
    jam_cmd->add_option("--on", jc.on_s, "Jammer on (s)")->capture_default_str();
    jam_cmd->add_option("--off", jc.off_s, "Jammer off (s)")->capture_default_str();
    jam_cmd->add_option("--total", jc.total_s, "Run length (s)")->capture_default_str();
    jam_cmd->add_flag("--mobile", jc.mobile, "Jammer walks past the receiver");
    jam_cmd->add_option("--jammer-power", jc.jammer_power_db, "Jammer power (dB)")->capture_default_str();
    jam_cmd->add_option("--wifi-power", jc.wifi_power_db, "Wi-Fi proxy power (dB)")->capture_default_str();
    jam_cmd->add_option("--rate", jc.sample_rate, "Sample rate (S/s)")->capture_default_str();
    jam_cmd->add_option("--seed", jc.seed, "Seed")->capture_default_str();
    jam_cmd->add_option("-o,--output", jam_out, "SINR CSV; report goes to <stem>.json")->required();
    jam_cmd->add_option("--svg", jam_svg, "Optional SVG plot");

    // ---------- compare ----------
    auto *cmp_cmd = app.add_subcommand("compare", "Normalized cross-correlation similarity of two metric traces");
    fs::path cmp_real, cmp_twin, cmp_out;
    int cmp_lag = 10;
    cmp_cmd->add_option("--real", cmp_real, "Reference CSV (t_s,value)")->required()->check(CLI::ExistingFile);
    cmp_cmd->add_option("--twin", cmp_twin, "Twin CSV (t_s,value)")->required()->check(CLI::ExistingFile);
    cmp_cmd->add_option("--max-lag", cmp_lag, "Largest lag in samples")->capture_default_str();
    cmp_cmd->add_option("-o,--output", cmp_out, "JSON output (default stdout)");

    // ---------- reproduce ----------
    auto *rep_cmd = app.add_subcommand("reproduce", "Run a pinned experiment and print a PASS/FAIL table");
    std::string rep_id;
    fs::path rep_out, rep_data = TWINCHAN_DATA_DIR;
    std::uint64_t rep_seed = 1;
    rep_cmd->add_option("id", rep_id, "Experiment id")->required()->check(CLI::IsMember(experiment_ids()));
    rep_cmd->add_option("--seed", rep_seed, "Seed")->capture_default_str();
    rep_cmd->add_option("--data-dir", rep_data, "Fixture directory")->capture_default_str();
    rep_cmd->add_option("-o,--output", rep_out, "JSON report");

    auto fail = [](int code, const std::string &kind, const std::string &msg)
    {
        std::cerr << json{{"error", {{"kind", kind}, {"message", msg}}}}.dump() << "\n";
        return code;
    };

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForVersion &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        return fail(kInvalid, "usage", e.what());
    }

    try
    {
        run.threads = resolve_thread_count(threads_opt);
        auto leaf = [&](CLI::App *c) { return c->parsed(); };

        // ---- seq gen ----
        if (leaf(seq_gen))
        {
            run.leaf = seq_gen;
            run.command = "seq gen";
            seq::CodeSequence code = seq::gen_glfsr(8, 0, 1);
            if (!code_spec.empty())
                code = seq::parse_code_spec(code_spec);
            else if (family == "glfsr")
                code = seq::gen_glfsr(degree, std::stoull(mask, nullptr, 0), lfsr_seed);
            else if (family == "gold")
                code = seq::gen_gold(std::stoull(poly_a, nullptr, 0), std::stoull(poly_b, nullptr, 0), shift);
            else if (family == "golay")
                code = seq::parse_code_spec("golay:" + golay_which + std::to_string(length));
            else
                code = seq::gen_ls(length);
            const fs::path txt = seq_out.string() + ".txt", bin = seq_out.string() + ".bin";
            {
                auto f = open_out(txt);
                for (int c : code.chips())
                    f << c << "\n";
            }
            {
                auto f = open_out(bin, true);
                for (int c : code.chips())
                    f.put(static_cast<char>(static_cast<std::int8_t>(c)));
            }
            run.manifest(txt, {txt, bin}, {{"code", code.describe()}, {"length", code.size()}});
            return kOk;
        }

        // ---- seq report ----
        if (leaf(seq_report))
        {
            run.leaf = seq_report;
            run.command = "seq report";
            json out = json::array();
            for (const auto &spec : report_codes)
            {
                const auto code = seq::parse_code_spec(spec);
                const auto m = seq::merit_report(code);
                out.push_back({{"code", code.describe()},
                               {"length", code.size()},
                               {"peak", m.peak},
                               {"max_off_peak_abs", m.max_off_peak_abs},
                               {"peak_to_sidelobe_db", std::isfinite(m.peak_to_sidelobe_db)
                                                           ? json(m.peak_to_sidelobe_db)
                                                           : json("inf")}});
            }
            if (report_out.empty())
                std::cout << out.dump(2) << "\n";
            else
            {
                open_out(report_out) << out.dump(2) << "\n";
                run.manifest(report_out, {report_out});
            }
            return kOk;
        }

        // ---- scenario build ----
        if (leaf(sc_build))
        {
            run.leaf = sc_build;
            run.command = "scenario build";
            run.inputs = {paths_csv, nodes_json};
            std::ifstream pin(paths_csv), nin(nodes_json);
            const auto nf = read_nodes_json(nin);
            const auto raw = parse_ray_paths(read_ray_path_csv(pin));
            BuildOptions opts;
            opts.name = nf.name;
            opts.update_interval = update_interval;
            opts.threads = run.threads;
            Diagnostics diag;
            const auto sc = build_scenario(nf.nodes, nf.radio, raw, nf.sampling_interval, opts, &diag);
            save_scenario(bundle_out, sc);
            for (const auto &w : diag.warnings)
                std::cerr << "warning: " << w << "\n";
            run.manifest(bundle_out, {bundle_out},
                         {{"frames", sc.frame_count()}, {"nodes", sc.node_ids()}, {"warnings", diag.warnings}});
            return kOk;
        }

        // ---- scenario inspect ----
        if (leaf(sc_inspect))
        {
            const auto sc = load_scenario(inspect_in);
            std::cout << scenario_header(sc).dump(2) << "\n";
            return kOk;
        }

        // ---- scenario heatmap ----
        if (leaf(sc_heat))
        {
            run.leaf = sc_heat;
            run.command = "scenario heatmap";
            run.inputs = {heat_in};
            const auto sc = load_scenario(heat_in);
            const auto m = pathloss_matrix(sc, heat_frame);
            if (heat_out.empty())
                write_matrix_csv(std::cout, m);
            else
            {
                auto f = open_out(heat_out);
                write_matrix_csv(f, m);
                f.close();
                run.manifest(heat_out, {heat_out});
            }
            return kOk;
        }

        // ---- sound ----
        if (leaf(snd_run) || leaf(snd_matrix))
        {
            const bool single = leaf(snd_run);
            run.leaf = single ? snd_run : snd_matrix;
            run.command = single ? "sound run" : "sound matrix";
            run.inputs = {snd_scenario};
            run.seed = snd_seed;
            auto sc = std::make_shared<const Scenario>(load_scenario(snd_scenario));
            EmulationSession session;
            for (int id : sc->node_ids())
                session.active_nodes.insert(id);
            bool any_mobile = false;
            for (const auto &n : sc->nodes())
                any_mobile = any_mobile || n.kind == NodeKind::Mobile;
            session.scenario = sc;
            session.sample_rate = snd_rate;
            session.rng_seed = snd_seed;
            session.noise_enabled = !snd_no_noise;
            session.loop_timeline = snd_loop || !any_mobile;
            session.threads = run.threads;
            SoundingConfig cfg;
            cfg.code = seq::parse_code_spec(snd_code);
            cfg.sample_rate = snd_rate;
            cfg.capture_duration = snd_duration;
            cfg.repetitions = snd_reps;
            cfg.chip_rate = snd_chip_rate;
            cfg.threshold_db = snd_threshold;
            Diagnostics diag;

            if (single)
            {
                const auto res = sound_link(session, snd_tx, snd_rx, cfg, &diag);
                json j = sounding_json(res, sc->radio());
                j["tx"] = snd_tx;
                j["rx"] = snd_rx;
                j["code"] = cfg.code.describe();
                j["warnings"] = diag.warnings;
                open_out(snd_out) << j.dump(2) << "\n";
                fs::path trace = snd_out;
                trace.replace_extension(".cir.csv");
                {
                    auto f = open_out(trace);
                    f << "delay_us,magnitude,gain_db\n";
                    for (std::size_t i = 0; i < res.mean_cir.size(); ++i)
                        f << static_cast<double>(i) / snd_rate * 1e6 << "," << res.mean_cir[i] << ","
                          << path_gain_db(res.mean_cir[i], sc->radio()) << "\n";
                }
                std::vector<fs::path> outs{snd_out, trace};
                if (!snd_svg.empty())
                {
                    PlotSeries s{"mean |h| (dB)", {}, {}};
                    for (std::size_t i = 0; i < res.mean_cir.size(); ++i)
                    {
                        s.x.push_back(static_cast<double>(i) / snd_rate * 1e6);
                        s.y.push_back(path_gain_db(res.mean_cir[i], sc->radio()));
                    }
                    auto f = open_out(snd_svg);
                    write_svg_line_plot(f, {s}, {"CIR " + std::to_string(snd_tx) + " -> " + std::to_string(snd_rx),
                                                 "delay (us)", "gain (dB)"});
                    outs.push_back(snd_svg);
                }
                run.manifest(snd_out, outs);
            }
            else
            {
                session.threads = 1;
                const auto m = sound_matrix(session, cfg, run.threads, &diag);
                {
                    auto f = open_out(matrix_out);
                    write_loss_matrix_csv(f, m);
                }
                run.manifest(matrix_out, {matrix_out},
                             {{"mean_loss_db", m.mean_loss()}, {"detected", m.detected()}, {"warnings", diag.warnings}});
            }
            return kOk;
        }

        // ---- jam ----
        if (leaf(jam_cmd))
        {
            run.leaf = jam_cmd;
            run.command = "jam";
            run.seed = jc.seed;
            jc.kind = jammer_kind_from_string(jam_kind);
            const auto res = run_jam_demo(jc, run.threads);
            {
                auto f = open_out(jam_out);
                write_metric_csv(f, res.sinr_db);
            }
            fs::path report = jam_out;
            report.replace_extension(".json");
            json j{{"kind", jam_kind},
                   {"mobile", jc.mobile},
                   {"on_s", jc.on_s},
                   {"off_s", jc.off_s},
                   {"pre_mean_db", res.report.pre_mean},
                   {"during_mean_db", res.report.during_mean},
                   {"drop_db", res.report.drop_db},
                   {"sinr_db", nan_to_null(res.sinr_db.values)},
                   {"warnings", res.warnings}};
            open_out(report) << j.dump(2) << "\n";
            std::vector<fs::path> outs{jam_out, report};
            if (!jam_svg.empty())
            {
                PlotSeries s{jam_kind, {}, res.sinr_db.values};
                for (std::size_t i = 0; i < s.y.size(); ++i)
                    s.x.push_back(static_cast<double>(i) * res.sinr_db.period);
                auto f = open_out(jam_svg);
                write_svg_line_plot(f, {s}, {"SINR under " + jam_kind + " jamming", "time (s)", "SINR (dB)"});
                outs.push_back(jam_svg);
            }
            run.manifest(jam_out, outs);
            return kOk;
        }

        // ---- compare ----
        if (leaf(cmp_cmd))
        {
            run.leaf = cmp_cmd;
            run.command = "compare";
            run.inputs = {cmp_real, cmp_twin};
            std::ifstream fr(cmp_real), ft(cmp_twin);
            const auto rep = compare_runs(read_metric_csv(fr, cmp_real.string()), read_metric_csv(ft, cmp_twin.string()),
                                          cmp_lag);
            json j{{"max_lag", rep.max_lag},
                   {"best_lag", rep.best_lag},
                   {"score", rep.score},
                   {"rho_by_lag", nan_to_null(rep.rho_by_lag)}};
            if (cmp_out.empty())
                std::cout << j.dump(2) << "\n";
            else
            {
                open_out(cmp_out) << j.dump(2) << "\n";
                run.manifest(cmp_out, {cmp_out});
            }
            return kOk;
        }

        // ---- reproduce ----
        if (leaf(rep_cmd))
        {
            run.leaf = rep_cmd;
            run.command = "reproduce";
            run.seed = rep_seed;
            ExperimentOptions opts;
            opts.threads = run.threads;
            opts.seed = rep_seed;
            opts.data_dir = rep_data;
            const auto r = run_experiment(rep_id, opts);
            print_report(r);
            if (!rep_out.empty())
            {
                json checks = json::array();
                for (const auto &c : r.checks)
                    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
                json j{{"id", r.id}, {"passed", r.passed()}, {"seconds", r.seconds}, {"checks", checks}, {"data", r.data}};
                open_out(rep_out) << j.dump(2) << "\n";
                run.manifest(rep_out, {rep_out});
            }
            return r.passed() ? kOk : kInternal;
        }
        return fail(kInvalid, "usage", "No command given.");
    }
    catch (const NoSignalError &e)
    {
        return fail(kInvalid, "no_signal", e.what());
    }
    catch (const std::invalid_argument &e)
    {
        return fail(kInvalid, "validation", e.what());
    }
    catch (const std::out_of_range &e)
    {
        return fail(kInvalid, "validation", e.what());
    }
    catch (const std::exception &e)
    {
        return fail(kInternal, "internal", e.what());
    }
}
