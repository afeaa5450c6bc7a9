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

#ifndef TWINCHAN_EXPERIMENTS_HPP
#define TWINCHAN_EXPERIMENTS_HPP

#include "twinchan/jamming.hpp"
#include "twinchan/sounder.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

// End-to-end reproduction runs with pinned seeds and tolerances.

namespace twinchan
{
    struct Check
    {
        std::string name;
        bool pass = false;
        std::string detail;
    };

    struct ExperimentReport
    {
        std::string id;
        std::vector<Check> checks;
        nlohmann::json data = nlohmann::json::object();
        double seconds = 0.0;

        bool passed() const;
        void add(std::string name, bool pass, std::string detail);
    };

    struct ExperimentOptions
    {
        unsigned threads = 1;
        std::uint64_t seed = 1;
        std::filesystem::path data_dir = TWINCHAN_DATA_DIR; // fixtures and traces
        double multitap_capture_s = 1.0;
        double base_loss_capture_s = 2.0;
        int stability_frames = 1500;
    };

    std::vector<std::string> experiment_ids();

    // Scenario in which every ordered link is one 0 dB tap at slot 0.
    std::shared_ptr<const Scenario> flat_scenario(int nodes, const RadioParams &radio, double duration_s,
                                                  double link_gain_db = 0.0);

    // Four taps at 0 / 1.28 / 2 / 4 us, -3 / -20 / -15 / -8 dB, compiled from the ray-path fixture.
    std::shared_ptr<const Scenario> four_tap_scenario(const std::filesystem::path &data_dir);

    ExperimentReport run_seq_tuning(const ExperimentOptions &opts);
    ExperimentReport run_dpeak(const ExperimentOptions &opts);
    ExperimentReport run_base_loss(const ExperimentOptions &opts);
    ExperimentReport run_multitap(const ExperimentOptions &opts);
    ExperimentReport run_tap_stability(const ExperimentOptions &opts);
    ExperimentReport run_jam(const ExperimentOptions &opts, bool mobile);
    ExperimentReport run_similarity(const ExperimentOptions &opts);
    ExperimentReport run_properties(const ExperimentOptions &opts);

    // Dispatch by id; throws std::invalid_argument for unknown ids.
    ExperimentReport run_experiment(const std::string &id, const ExperimentOptions &opts);

    // Brute-force evaluation of the normalized cross-correlation on zero-padded
    // copies, written independently of normalized_xcorr for cross-checking.
    std::vector<double> brute_force_xcorr(std::vector<double> x, std::vector<double> y, int max_lag);

} // namespace twinchan

#endif
