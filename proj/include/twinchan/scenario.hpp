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

#ifndef TWINCHAN_SCENARIO_HPP
#define TWINCHAN_SCENARIO_HPP

#include "twinchan/core.hpp"

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace twinchan
{
    struct Vec3
    {
        double x = 0.0, y = 0.0, z = 0.0;
        bool operator==(const Vec3 &) const = default;
    };

    double distance(const Vec3 &a, const Vec3 &b);

    enum class NodeKind
    {
        Antenna,
        Static,
        Mobile
    };

    std::string to_string(NodeKind kind);
    NodeKind node_kind_from_string(const std::string &s);

    struct Node
    {
        int id = 0;
        NodeKind kind = NodeKind::Static;
        Vec3 position;               // start position for mobile nodes
        double speed = 0.0;          // m/s, 0 unless mobile
        std::vector<Vec3> trajectory; // waypoints, mobile only

        void validate() const;
    };

    struct LinkId
    {
        int tx = 0;
        int rx = 0;
        auto operator<=>(const LinkId &) const = default;
    };

    std::string to_string(const LinkId &link);

    // Scenario-wide descriptive data; serialized in the bundle header.
    struct ScenarioMetadata
    {
        std::string name;
        TapGrid grid;
        double coherence_distance_m = 15.0;
        std::map<std::string, std::string> creation; // free-form build parameters
        std::vector<std::string> warnings;
    };

    // Nodes, radio parameters and one CirTimeline per ordered node pair.
    class Scenario
    {
    public:
        Scenario(std::vector<Node> nodes, RadioParams radio, double sampling_interval,
                 std::map<LinkId, CirTimeline> links, ScenarioMetadata metadata);

        const std::vector<Node> &nodes() const { return nodes_; }
        const RadioParams &radio() const { return radio_; }
        double sampling_interval() const { return sampling_interval_; }
        const std::map<LinkId, CirTimeline> &links() const { return links_; }
        const ScenarioMetadata &metadata() const { return metadata_; }

        const CirTimeline &link(int tx, int rx) const;
        bool has_node(int id) const;
        const Node &node(int id) const;
        std::vector<int> node_ids() const;
        std::size_t frame_count() const;
        double update_interval() const;

    private:
        std::vector<Node> nodes_;
        RadioParams radio_;
        double sampling_interval_;
        std::map<LinkId, CirTimeline> links_;
        ScenarioMetadata metadata_;
    };

    // ---------- Trajectories ----------

    // Positions spaced speed * ts along the polyline from its first waypoint;
    // the end point is appended when the last step falls short of it.
    std::vector<Vec3> sample_trajectory(const Node &node, double ts);

    // ---------- Ray-tracer ingestion ----------

    struct RayPathRecord
    {
        double t = 0.0;   // s
        int tx = 0;
        int rx = 0;
        double toa = 0.0; // s
        double gain_db = 0.0;
        double phase = 0.0; // rad
    };

    struct RayPathFile
    {
        std::vector<RayPathRecord> records;
    };

    // CSV with header `t_s,tx,rx,toa_s,gain_db,phase_rad`. Errors name the offending line.
    RayPathFile read_ray_path_csv(std::istream &in);
    void write_ray_path_csv(std::ostream &out, const RayPathFile &file);

    struct CirKey
    {
        int tx = 0;
        int rx = 0;
        double t = 0.0;
        auto operator<=>(const CirKey &) const = default;
    };

    using RawCirMap = std::map<CirKey, RawCir>;

    // Groups records per link and timestamp. Every link seen anywhere must be
    // present at every timestamp; duplicate (link, t, toa) rows are rejected.
    RawCirMap parse_ray_paths(const RayPathFile &file);

    // ---------- Tap approximation ----------

    struct QuantizeOptions
    {
        TapGrid grid;
        int max_taps = kMaxActiveTaps;
        int max_iterations = 50;
        std::uint64_t seed = 0x5eed;      // k-means++ seeding
        double max_dropped_fraction = 0.05; // of total power, beyond the max excess delay
    };

    struct QuantizedCir
    {
        TapSet taps;
        double propagation_delay = 0.0; // first-arrival ToA that was mapped to slot 0
        int dropped_paths = 0;
        double dropped_power_fraction = 0.0;
        std::vector<int> assignment; // cluster index per input path, -1 if dropped
    };

    // Reduces a RawCir to at most max_taps taps on the slot grid with 1-D
    // power-weighted k-means over delay. Members of a cluster are summed
    // coherently; clusters that round to the same slot are merged.
    QuantizedCir quantize_taps(const RawCir &raw, const QuantizeOptions &options = {}, Diagnostics *diag = nullptr);

    // ---------- Scenario build ----------

    struct BuildOptions
    {
        std::string name = "scenario";
        double update_interval = kDefaultUpdateInterval;
        QuantizeOptions quantize;
        unsigned threads = 1;
    };

    // One CirTimeline per ordered pair of distinct nodes. Frames hold the most
    // recent channel sample (zero-order hold).
    Scenario build_scenario(const std::vector<Node> &nodes, const RadioParams &radio, const RawCirMap &rawcirs,
                            double ts, const BuildOptions &options = {}, Diagnostics *diag = nullptr);

    // ---------- Path loss ----------

    // Square matrix in node_ids() order; entry (i, j) = -10 log10(sum |g|^2) of the
    // tx=i, rx=j frame. Diagonal entries are NaN; links with zero power are +inf.
    struct PathLossMatrix
    {
        std::vector<int> node_ids;
        std::vector<std::vector<double>> loss_db;
    };

    PathLossMatrix pathloss_matrix(const Scenario &scenario, std::size_t frame);

    void write_matrix_csv(std::ostream &out, const PathLossMatrix &m);

} // namespace twinchan

#endif
