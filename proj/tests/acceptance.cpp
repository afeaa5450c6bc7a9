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

// Acceptance runner: `acceptance N` evaluates criterion N (1-8), prints one
// PASS/FAIL line followed by the individual checks, and exits 0 or 1.

#include "twinchan/core.hpp"
#include "twinchan/experiments.hpp"

#include <cstdio>
#include <exception>
#include <map>
#include <string>
#include <vector>

using namespace twinchan;

namespace
{
    struct Criterion
    {
        std::string title;
        std::vector<std::string> experiments;
    };

    const std::map<int, Criterion> kCriteria{
        {1, {"multi-tap fidelity", {"multitap"}}},
        {2, {"correlation peak spacing", {"dpeak"}}},
        {3, {"base loss calibration", {"base-loss"}}},
        {4, {"tap stability", {"tap-stability"}}},
        {5, {"sequence ranking", {"seq-tuning"}}},
        {6, {"jamming drop", {"jam-static", "jam-mobile"}}},
        {7, {"trace similarity", {"similarity"}}},
        {8, {"twin properties", {"properties"}}},
    };
} // namespace

int main(int argc, char **argv)
{
    if (argc != 2)
    {
        std::fprintf(stderr, "usage: acceptance <criterion 1-8>\n");
        return 2;
    }
    const int n = std::atoi(argv[1]);
    const auto it = kCriteria.find(n);
    if (it == kCriteria.end())
    {
        std::fprintf(stderr, "unknown criterion %s\n", argv[1]);
        return 2;
    }

    ExperimentOptions opts;
    opts.threads = resolve_thread_count(0);
    std::vector<ExperimentReport> reports;
    bool pass = true;
    std::string error;
    try
    {
        for (const auto &id : it->second.experiments)
        {
            reports.push_back(run_experiment(id, opts));
            pass = pass && reports.back().passed();
        }
    }
    catch (const std::exception &e)
    {
        pass = false;
        error = e.what();
    }

    std::size_t failed = 0, total = 0;
    for (const auto &r : reports)
        for (const auto &c : r.checks)
        {
            ++total;
            failed += c.pass ? 0 : 1;
        }
    std::printf("%s criterion %d: %s (%zu/%zu checks passed)\n", pass ? "PASS" : "FAIL", n,
                it->second.title.c_str(), total - failed, total);
    for (const auto &r : reports)
        for (const auto &c : r.checks)
            std::printf("  [%s] %s/%s: %s\n", c.pass ? "ok" : "FAIL", r.id.c_str(), c.name.c_str(),
                        c.detail.c_str());
    if (!error.empty())
        std::printf("  error: %s\n", error.c_str());
    return pass ? 0 : 1;
}
