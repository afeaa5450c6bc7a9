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

#ifndef TWINCHAN_SCENARIO_IO_HPP
#define TWINCHAN_SCENARIO_IO_HPP

#include "twinchan/scenario.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace twinchan
{
    inline constexpr std::uint32_t kBundleVersion = 1;

    // .twsc layout:
    //   "TWSC" | u32 version | u64 header_bytes | JSON header | binary section
    // Binary section, per link in header "links" order, per frame:
    //   f64 propagation_delay_s | u32 n_taps | n_taps x (u32 slot | f64 re | f64 im)
    // All integers and floats little-endian.
    void write_scenario(std::ostream &out, const Scenario &scenario);
    Scenario read_scenario(std::istream &in);
    void save_scenario(const std::filesystem::path &path, const Scenario &scenario);
    Scenario load_scenario(const std::filesystem::path &path);

    nlohmann::json scenario_header(const Scenario &scenario);

    // Single TapSet in the per-frame binary encoding (without the delay field).
    std::vector<std::uint8_t> encode_tapset(const TapSet &taps);
    TapSet decode_tapset(std::span<const std::uint8_t> bytes, int slot_count = kSlotCount);

    nlohmann::json to_json(const RadioParams &radio);
    RadioParams radio_from_json(const nlohmann::json &j);
    nlohmann::json to_json(const Node &node);
    Node node_from_json(const nlohmann::json &j);

    // Node layout consumed by `scenario build`:
    // {"name": s, "sampling_interval_s": Ts, "radio": {...},
    //  "nodes": [{"id", "kind", "position": [x,y,z], "speed", "trajectory": [[x,y,z], ...]}]}
    struct NodesFile
    {
        std::string name = "scenario";
        double sampling_interval = 1.0;
        RadioParams radio;
        std::vector<Node> nodes;
    };

    NodesFile read_nodes_json(std::istream &in);
    void write_nodes_json(std::ostream &out, const NodesFile &file);

} // namespace twinchan

#endif
