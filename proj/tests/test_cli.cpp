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

// Drives the twinchan executable end to end.

#include "twinchan/scenario_io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace twinchan;
namespace fs = std::filesystem;
using nlohmann::json;

namespace
{
    const fs::path kFixtures = fs::path(TWINCHAN_DATA_DIR) / "fixtures";

    struct Workdir
    {
        fs::path dir;
        explicit Workdir(const std::string &name) : dir(fs::temp_directory_path() / ("twinchan_cli_" + name))
        {
            fs::remove_all(dir);
            fs::create_directories(dir);
        }
        ~Workdir() { fs::remove_all(dir); }
        fs::path operator/(const std::string &f) const { return dir / f; }
    };

    int run(const std::string &args, const fs::path &err = "/dev/null", const std::string &env = "")
    {
        const std::string cmd = env + " " + TWINCHAN_CLI + " " + args + " > /dev/null 2> " + err.string();
        const int rc = std::system(cmd.c_str());
        return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    }

    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    json read_json(const fs::path &p) { return json::parse(slurp(p)); }
} // namespace

TEST_CASE("seq gen writes text, bytes and a manifest")
{
    Workdir w("seq");
    CHECK(run("seq gen --family glfsr --degree 8 --mask 0 --seed 1 -o " + (w / "g").string()) == 0);
    const auto txt = slurp(w / "g.txt");
    CHECK(std::count(txt.begin(), txt.end(), '\n') == 255);
    const auto bin = slurp(w / "g.bin");
    REQUIRE(bin.size() == 255);
    CHECK(static_cast<signed char>(bin[0]) == -1);
    const auto m = read_json(w / "g.txt.manifest.json");
    CHECK(m["command"] == "seq gen");
    CHECK(m["config"]["gen"]["degree"] == "8");
    CHECK(m.contains("started_utc"));
    CHECK(m["version"].is_string());
}

TEST_CASE("scenario build, inspect and heatmap")
{
    Workdir w("scenario");
    const auto bundle = w / "ft.twsc";
    CHECK(run("scenario build --paths " + (kFixtures / "fourtap_rays.csv").string() + " --nodes " +
              (kFixtures / "fourtap_nodes.json").string() + " -o " + bundle.string()) == 0);
    REQUIRE(fs::exists(bundle));
    const auto m = read_json(bundle.string() + ".manifest.json");
    REQUIRE(m["inputs"].size() == 2);
    CHECK(m["inputs"][0]["sha256"].get<std::string>().size() == 64);

    // Rebuilding gives the same bytes.
    const auto again = w / "again.twsc";
    CHECK(run("--threads 3 scenario build --paths " + (kFixtures / "fourtap_rays.csv").string() + " --nodes " +
              (kFixtures / "fourtap_nodes.json").string() + " -o " + again.string()) == 0);
    CHECK(slurp(bundle) == slurp(again));

    CHECK(run("scenario heatmap " + bundle.string() + " --frame 0 -o " + (w / "heat.csv").string()) == 0);
    std::ostringstream lib;
    write_matrix_csv(lib, pathloss_matrix(load_scenario(bundle), 0));
    CHECK(slurp(w / "heat.csv") == lib.str());

    CHECK(run("scenario inspect " + bundle.string()) == 0);
    CHECK(run("scenario heatmap " + bundle.string() + " --frame 5000", w / "err.txt") == 2);
}

TEST_CASE("malformed ray-path CSV is a validation error naming the row")
{
    Workdir w("bad");
    {
        std::ofstream f(w / "bad.csv");
        f << "t_s,tx,rx,toa_s,gain_db,phase_rad\n0,1,2,1e-7,-3,0\n0,1,2,abc,0,0\n";
    }
    const auto err = w / "err.txt";
    CHECK(run("scenario build --paths " + (w / "bad.csv").string() + " --nodes " +
                  (kFixtures / "fourtap_nodes.json").string() + " -o " + (w / "x.twsc").string(),
              err) == 2);
    const auto e = json::parse(slurp(err));
    CHECK(e["error"]["kind"] == "validation");
    CHECK(e["error"]["message"].get<std::string>().find("line 3") != std::string::npos);
}

TEST_CASE("usage errors exit 2 with JSON")
{
    Workdir w("usage");
    const auto err = w / "err.txt";
    CHECK(run("", err) == 2);
    CHECK(json::parse(slurp(err))["error"]["kind"] == "usage");
    CHECK(run("reproduce no-such-experiment", err) == 2);
    CHECK(run("compare --real /nonexistent.csv --twin /nonexistent.csv", err) == 2);
}

TEST_CASE("sound run on the four-tap fixture")
{
    Workdir w("sound");
    const auto bundle = w / "ft.twsc";
    REQUIRE(run("scenario build --paths " + (kFixtures / "fourtap_rays.csv").string() + " --nodes " +
                (kFixtures / "fourtap_nodes.json").string() + " -o " + bundle.string()) == 0);
    const auto out = w / "s.json";
    CHECK(run("sound run --scenario " + bundle.string() +
              " --tx 1 --rx 2 --code glfsr:8:0:1 --rate 50e6 --duration 0.05 -o " + out.string() + " --svg " +
              (w / "s.svg").string()) == 0);
    const auto r = read_json(out);
    REQUIRE(r["taps"].size() == 4);
    const std::vector<double> toa{0.0, 1.28, 2.0, 4.0};
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(r["taps"][i]["toa_us"].get<double>() == doctest::Approx(toa[i]).epsilon(1e-9));
    CHECK(fs::exists(w / "s.cir.csv"));
    CHECK(slurp(w / "s.svg").rfind("<svg", 0) == 0);

    // Same seed, same bytes.
    CHECK(run("sound run --scenario " + bundle.string() + " --rate 50e6 --duration 0.05 -o " +
              (w / "s2.json").string()) == 0);
    CHECK(slurp(w / "s.cir.csv") == slurp(w / "s2.cir.csv"));
}

TEST_CASE("jam and compare")
{
    Workdir w("jam");
    const auto a = w / "a.csv", b = w / "b.csv";
    CHECK(run("jam --kind wideband --on 3 --off 6 --total 9 -o " + a.string()) == 0);
    CHECK(run("jam --kind wideband --on 3 --off 6 --total 9 -o " + b.string(), "/dev/null",
              "TWINCHAN_THREADS=2") == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(read_json(b.string() + ".manifest.json")["config"]["threads_resolved"] == 2);
    const auto rep = read_json(w / "a.json");
    CHECK(rep["drop_db"].get<double>() > 10.0);

    const auto cmp = w / "cmp.json";
    CHECK(run("compare --real " + a.string() + " --twin " + b.string() + " --max-lag 3 -o " + cmp.string()) == 0);
    CHECK(read_json(cmp)["score"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("config file sits between defaults and flags")
{
    Workdir w("config");
    {
        std::ofstream f(w / "cfg.toml");
        f << "[jam]\nkind = \"narrowband\"\ntotal = 6\non = 1\noff = 3\n";
    }
    const auto out = w / "j.csv";
    CHECK(run("--config " + (w / "cfg.toml").string() + " jam --total 5 -o " + out.string()) == 0);
    const auto m = read_json(out.string() + ".manifest.json");
    CHECK(m["config"]["jam"]["kind"] == "narrowband");
    CHECK(m["config"]["jam"]["total"] == "5");
    const auto csv = slurp(out);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6); // header + 5 points
}

TEST_CASE("reproduce exits 0 on success")
{
    Workdir w("reproduce");
    CHECK(run("reproduce seq-tuning -o " + (w / "r.json").string()) == 0);
    CHECK(read_json(w / "r.json")["passed"] == true);
}
