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

#include "twinchan/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace twinchan
{
    double distance(const Vec3 &a, const Vec3 &b)
    {
        return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
    }

    std::string to_string(NodeKind kind)
    {
        switch (kind)
        {
        case NodeKind::Antenna:
            return "antenna";
        case NodeKind::Static:
            return "static";
        case NodeKind::Mobile:
            return "mobile";
        }
        return "unknown";
    }

    NodeKind node_kind_from_string(const std::string &s)
    {
        if (s == "antenna")
            return NodeKind::Antenna;
        if (s == "static")
            return NodeKind::Static;
        if (s == "mobile")
            return NodeKind::Mobile;
        throw std::invalid_argument("Unknown node kind '" + s + "' (expected antenna, static or mobile).");
    }

    void Node::validate() const
    {
        const std::string who = "Node " + std::to_string(id) + ": ";
        if (position.z < 0.0)
            throw std::invalid_argument(who + "height must be non-negative.");
        for (const auto &w : trajectory)
            if (w.z < 0.0)
                throw std::invalid_argument(who + "waypoint height must be non-negative.");
        if (kind == NodeKind::Mobile)
        {
            if (!(speed > 0.0))
                throw std::invalid_argument(who + "mobile nodes need a positive speed.");
            if (trajectory.size() < 2)
                throw std::invalid_argument(who + "mobile nodes need at least two waypoints.");
        }
        else if (speed != 0.0)
            throw std::invalid_argument(who + "only mobile nodes may have a non-zero speed.");
    }

    std::string to_string(const LinkId &link) { return std::to_string(link.tx) + "->" + std::to_string(link.rx); }

    // ---------- Scenario ----------

    Scenario::Scenario(std::vector<Node> nodes, RadioParams radio, double sampling_interval,
                       std::map<LinkId, CirTimeline> links, ScenarioMetadata metadata)
        : nodes_(std::move(nodes)), radio_(radio), sampling_interval_(sampling_interval), links_(std::move(links)),
          metadata_(std::move(metadata))
    {
        radio_.validate();
        if (!(sampling_interval_ > 0.0))
            throw std::invalid_argument("Scenario: sampling interval must be positive.");
        std::set<int> ids;
        for (const auto &n : nodes_)
        {
            n.validate();
            if (!ids.insert(n.id).second)
                throw std::invalid_argument("Scenario: duplicate node id " + std::to_string(n.id) + ".");
        }
        for (int tx : ids)
            for (int rx : ids)
                if (tx != rx && !links_.contains({tx, rx}))
                    throw std::invalid_argument("Scenario: missing link " + to_string(LinkId{tx, rx}) + ".");

        std::size_t frames = 0;
        double interval = 0.0;
        for (const auto &[id, tl] : links_)
        {
            if (!ids.contains(id.tx) || !ids.contains(id.rx) || id.tx == id.rx)
                throw std::invalid_argument("Scenario: link " + to_string(id) + " does not join two distinct nodes.");
            tl.validate();
            if (frames == 0)
            {
                frames = tl.frame_count();
                interval = tl.update_interval;
            }
            else if (tl.frame_count() != frames || tl.update_interval != interval)
                throw std::invalid_argument("Scenario: all links must share update interval and frame count.");
            if (static_cast<int>(tl.max_slot()) >= metadata_.grid.slot_count)
                throw std::invalid_argument("Scenario: link " + to_string(id) + " uses a slot beyond the grid.");
        }
    }

    const CirTimeline &Scenario::link(int tx, int rx) const
    {
        auto it = links_.find({tx, rx});
        if (it == links_.end())
            throw std::invalid_argument("Scenario has no link " + to_string(LinkId{tx, rx}) + ".");
        return it->second;
    }

    bool Scenario::has_node(int id) const
    {
        return std::any_of(nodes_.begin(), nodes_.end(), [id](const Node &n) { return n.id == id; });
    }

    const Node &Scenario::node(int id) const
    {
        for (const auto &n : nodes_)
            if (n.id == id)
                return n;
        throw std::invalid_argument("Scenario has no node " + std::to_string(id) + ".");
    }

    std::vector<int> Scenario::node_ids() const
    {
        std::vector<int> ids;
        for (const auto &n : nodes_)
            ids.push_back(n.id);
        std::sort(ids.begin(), ids.end());
        return ids;
    }

    std::size_t Scenario::frame_count() const { return links_.empty() ? 0 : links_.begin()->second.frame_count(); }

    double Scenario::update_interval() const
    {
        return links_.empty() ? kDefaultUpdateInterval : links_.begin()->second.update_interval;
    }

    // ---------- Trajectories ----------

    std::vector<Vec3> sample_trajectory(const Node &node, double ts)
    {
        if (node.kind != NodeKind::Mobile)
            throw std::invalid_argument("sample_trajectory: node " + std::to_string(node.id) + " is not mobile.");
        node.validate();
        if (!(ts > 0.0))
            throw std::invalid_argument("sample_trajectory: sampling interval must be positive.");

        const auto &wp = node.trajectory;
        std::vector<double> cumulative{0.0};
        for (std::size_t i = 1; i < wp.size(); ++i)
            cumulative.push_back(cumulative.back() + distance(wp[i - 1], wp[i]));
        const double total = cumulative.back();
        if (!(total > 0.0))
            throw std::invalid_argument("sample_trajectory: node " + std::to_string(node.id) +
                                        " has a zero-length trajectory.");

        auto point_at = [&](double s)
        {
            auto it = std::upper_bound(cumulative.begin(), cumulative.end(), s);
            std::size_t seg = it == cumulative.begin() ? 0 : static_cast<std::size_t>(it - cumulative.begin()) - 1;
            seg = std::min(seg, wp.size() - 2);
            const double len = cumulative[seg + 1] - cumulative[seg];
            const double f = len > 0.0 ? std::clamp((s - cumulative[seg]) / len, 0.0, 1.0) : 0.0;
            const auto &a = wp[seg];
            const auto &b = wp[seg + 1];
            return Vec3{a.x + f * (b.x - a.x), a.y + f * (b.y - a.y), a.z + f * (b.z - a.z)};
        };

        const double step = node.speed * ts;
        std::vector<Vec3> out;
        // Integer stepping avoids accumulating floating error in the arc length.
        const double eps = 1e-9 * std::max(1.0, total);
        for (std::size_t k = 0;; ++k)
        {
            const double s = static_cast<double>(k) * step;
            if (s > total + eps)
                break;
            out.push_back(point_at(std::min(s, total)));
            if (s >= total - eps)
                return out;
        }
        out.push_back(wp.back());
        return out;
    }

    // ---------- Ray-path CSV ----------

    namespace
    {
        std::vector<std::string> split_csv_line(const std::string &line)
        {
            std::vector<std::string> out;
            std::stringstream ss(line);
            for (std::string item; std::getline(ss, item, ',');)
            {
                auto b = item.find_first_not_of(" \t\r");
                auto e = item.find_last_not_of(" \t\r");
                out.push_back(b == std::string::npos ? std::string{} : item.substr(b, e - b + 1));
            }
            if (!line.empty() && line.back() == ',')
                out.emplace_back();
            return out;
        }

        double to_double(const std::string &s, std::size_t line_no, const char *column)
        {
            std::size_t pos = 0;
            double v = 0.0;
            try
            {
                v = std::stod(s, &pos);
            }
            catch (const std::exception &)
            {
                pos = 0;
            }
            if (pos == 0 || pos != s.size() || !std::isfinite(v))
                throw std::invalid_argument("Ray-path CSV line " + std::to_string(line_no) + ": column '" + column +
                                            "' value '" + s + "' is not a finite number.");
            return v;
        }

        int to_int(const std::string &s, std::size_t line_no, const char *column)
        {
            std::size_t pos = 0;
            long v = 0;
            try
            {
                v = std::stol(s, &pos);
            }
            catch (const std::exception &)
            {
                pos = 0;
            }
            if (pos == 0 || pos != s.size())
                throw std::invalid_argument("Ray-path CSV line " + std::to_string(line_no) + ": column '" + column +
                                            "' value '" + s + "' is not an integer.");
            return static_cast<int>(v);
        }
    } // namespace

    RayPathFile read_ray_path_csv(std::istream &in)
    {
        static const std::vector<std::string> kHeader{"t_s", "tx", "rx", "toa_s", "gain_db", "phase_rad"};
        RayPathFile file;
        std::string line;
        std::size_t line_no = 0;
        bool header_seen = false;
        while (std::getline(in, line))
        {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos)
                continue;
            auto cols = split_csv_line(line);
            if (!header_seen)
            {
                if (cols != kHeader)
                    throw std::invalid_argument("Ray-path CSV line " + std::to_string(line_no) +
                                                ": expected header t_s,tx,rx,toa_s,gain_db,phase_rad.");
                header_seen = true;
                continue;
            }
            if (cols.size() != kHeader.size())
                throw std::invalid_argument("Ray-path CSV line " + std::to_string(line_no) + ": expected 6 columns, got " +
                                            std::to_string(cols.size()) + ".");
            RayPathRecord r;
            r.t = to_double(cols[0], line_no, "t_s");
            r.tx = to_int(cols[1], line_no, "tx");
            r.rx = to_int(cols[2], line_no, "rx");
            r.toa = to_double(cols[3], line_no, "toa_s");
            r.gain_db = to_double(cols[4], line_no, "gain_db");
            r.phase = to_double(cols[5], line_no, "phase_rad");
            if (r.toa < 0.0)
                throw std::invalid_argument("Ray-path CSV line " + std::to_string(line_no) + ": negative toa_s.");
            if (r.tx == r.rx)
                throw std::invalid_argument("Ray-path CSV line " + std::to_string(line_no) + ": tx equals rx.");
            file.records.push_back(r);
        }
        if (!header_seen)
            throw std::invalid_argument("Ray-path CSV is empty (missing header).");
        return file;
    }

    void write_ray_path_csv(std::ostream &out, const RayPathFile &file)
    {
        out << "t_s,tx,rx,toa_s,gain_db,phase_rad\n";
        out << std::setprecision(17);
        for (const auto &r : file.records)
            out << r.t << ',' << r.tx << ',' << r.rx << ',' << r.toa << ',' << r.gain_db << ',' << r.phase << '\n';
    }

    RawCirMap parse_ray_paths(const RayPathFile &file)
    {
        std::map<CirKey, std::vector<RayPath>> grouped;
        std::set<std::tuple<int, int, double, double>> seen;
        std::map<std::pair<int, int>, double> last_t;
        std::set<std::pair<int, int>> links;
        std::set<double> times;

        for (const auto &r : file.records)
        {
            if (!seen.insert({r.tx, r.rx, r.t, r.toa}).second)
                throw std::invalid_argument("Ray paths: duplicate row for link " + to_string(LinkId{r.tx, r.rx}) +
                                            " at t=" + std::to_string(r.t) + " with toa=" + std::to_string(r.toa) + ".");
            auto [it, inserted] = last_t.try_emplace({r.tx, r.rx}, r.t);
            if (!inserted)
            {
                if (r.t < it->second)
                    throw std::invalid_argument("Ray paths: timestamps decrease for link " +
                                                to_string(LinkId{r.tx, r.rx}) + ".");
                it->second = r.t;
            }
            links.insert({r.tx, r.rx});
            times.insert(r.t);
            const cplx gain = std::polar(db_to_amplitude(r.gain_db), r.phase);
            grouped[{r.tx, r.rx, r.t}].push_back({r.toa, gain});
        }

        for (double t : times)
            for (const auto &[tx, rx] : links)
                if (!grouped.contains({tx, rx, t}))
                    throw std::invalid_argument("Ray paths: link " + to_string(LinkId{tx, rx}) +
                                                " has no channel sample at t=" + std::to_string(t) + ".");

        RawCirMap out;
        for (auto &[key, paths] : grouped)
            out.emplace(key, RawCir(std::move(paths), key.t));
        return out;
    }

    // ---------- Tap approximation ----------

    namespace
    {
        // Deterministic uniform in [0, 1) independent of the standard library's distributions.
        double uniform01(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

        std::size_t weighted_pick(const std::vector<double> &weights, std::mt19937_64 &rng)
        {
            const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
            double r = uniform01(rng) * total;
            for (std::size_t i = 0; i < weights.size(); ++i)
            {
                if (weights[i] <= 0.0)
                    continue;
                if (r < weights[i])
                    return i;
                r -= weights[i];
            }
            for (std::size_t i = weights.size(); i-- > 0;)
                if (weights[i] > 0.0)
                    return i;
            return 0;
        }

        // 1-D weighted k-means with k-means++ seeding; returns cluster per point.
        std::vector<int> kmeans_1d(const std::vector<double> &x, const std::vector<double> &w, int k, int max_iter,
                                   std::uint64_t seed)
        {
            std::mt19937_64 rng(seed);
            std::vector<double> centers{x[weighted_pick(w, rng)]};
            while (static_cast<int>(centers.size()) < k)
            {
                std::vector<double> d2(x.size());
                for (std::size_t i = 0; i < x.size(); ++i)
                {
                    double best = std::numeric_limits<double>::infinity();
                    for (double c : centers)
                        best = std::min(best, (x[i] - c) * (x[i] - c));
                    d2[i] = w[i] * best;
                }
                if (std::accumulate(d2.begin(), d2.end(), 0.0) <= 0.0)
                    break;
                centers.push_back(x[weighted_pick(d2, rng)]);
            }
            std::sort(centers.begin(), centers.end());

            std::vector<int> assign(x.size(), -1);
            for (int iter = 0; iter < max_iter; ++iter)
            {
                bool changed = false;
                for (std::size_t i = 0; i < x.size(); ++i)
                {
                    int best = 0;
                    for (int c = 1; c < static_cast<int>(centers.size()); ++c)
                        if (std::abs(x[i] - centers[c]) < std::abs(x[i] - centers[best]))
                            best = c;
                    if (assign[i] != best)
                    {
                        assign[i] = best;
                        changed = true;
                    }
                }
                if (!changed)
                    break;
                for (int c = 0; c < static_cast<int>(centers.size()); ++c)
                {
                    double sw = 0.0, sx = 0.0, su = 0.0;
                    int count = 0;
                    for (std::size_t i = 0; i < x.size(); ++i)
                        if (assign[i] == c)
                        {
                            sw += w[i];
                            sx += w[i] * x[i];
                            su += x[i];
                            ++count;
                        }
                    if (count > 0)
                        centers[c] = sw > 0.0 ? sx / sw : su / count;
                }
            }
            return assign;
        }
    } // namespace

    QuantizedCir quantize_taps(const RawCir &raw, const QuantizeOptions &options, Diagnostics *diag)
    {
        if (raw.path_count() == 0)
            throw std::invalid_argument("quantize_taps: RawCir has no paths.");
        if (options.max_taps < 1)
            throw std::invalid_argument("quantize_taps: max_taps must be positive.");
        const auto paths = raw.paths();
        const double slot = options.grid.slot_width;
        const int slots = options.grid.slot_count;

        QuantizedCir out;
        out.propagation_delay = paths.front().toa;
        out.assignment.assign(paths.size(), -1);

        std::vector<std::size_t> kept;
        double dropped_power = 0.0;
        for (std::size_t i = 0; i < paths.size(); ++i)
        {
            const double excess = paths[i].toa - out.propagation_delay;
            if (std::llround(excess / slot) >= slots)
            {
                ++out.dropped_paths;
                dropped_power += std::norm(paths[i].gain);
            }
            else
                kept.push_back(i);
        }
        const double total_power = raw.total_power();
        out.dropped_power_fraction = total_power > 0.0 ? dropped_power / total_power : 0.0;
        if (out.dropped_paths > 0)
        {
            warn(diag, "quantize_taps: dropped " + std::to_string(out.dropped_paths) +
                           " path(s) beyond the maximum excess delay at t=" + std::to_string(raw.timestamp()) + ".");
            if (out.dropped_power_fraction > options.max_dropped_fraction)
                throw std::invalid_argument("quantize_taps: paths beyond the maximum excess delay carry " +
                                            std::to_string(100.0 * out.dropped_power_fraction) + "% of the power.");
        }

        std::vector<double> delay(kept.size()), weight(kept.size());
        for (std::size_t j = 0; j < kept.size(); ++j)
        {
            delay[j] = paths[kept[j]].toa - out.propagation_delay;
            weight[j] = std::norm(paths[kept[j]].gain);
        }
        if (std::accumulate(weight.begin(), weight.end(), 0.0) <= 0.0)
            std::fill(weight.begin(), weight.end(), 1.0);

        const std::set<double> distinct(delay.begin(), delay.end());
        const int k = std::min<int>({options.max_taps, static_cast<int>(kept.size()), static_cast<int>(distinct.size())});
        const auto cluster = kmeans_1d(delay, weight, k, options.max_iterations, options.seed);

        // Power-weighted mean delay per cluster, rounded to the grid; equal slots merge.
        std::map<int, int> slot_of_cluster;
        for (int c = 0; c < k; ++c)
        {
            double sw = 0.0, sx = 0.0, su = 0.0;
            int count = 0;
            for (std::size_t j = 0; j < kept.size(); ++j)
                if (cluster[j] == c)
                {
                    sw += weight[j];
                    sx += weight[j] * delay[j];
                    su += delay[j];
                    ++count;
                }
            if (count == 0)
                continue;
            const double mean = sw > 0.0 ? sx / sw : su / count;
            slot_of_cluster[c] = static_cast<int>(std::clamp<long long>(std::llround(mean / slot), 0, slots - 1));
        }

        std::map<int, cplx> by_slot;
        for (std::size_t j = 0; j < kept.size(); ++j)
            by_slot[slot_of_cluster.at(cluster[j])] += paths[kept[j]].gain;

        std::vector<Tap> taps;
        std::map<int, int> tap_index;
        for (const auto &[s, g] : by_slot)
        {
            tap_index[s] = static_cast<int>(taps.size());
            taps.push_back({s, g});
        }
        for (std::size_t j = 0; j < kept.size(); ++j)
            out.assignment[kept[j]] = tap_index.at(slot_of_cluster.at(cluster[j]));
        out.taps = TapSet(std::move(taps), slots);
        return out;
    }

    // ---------- Scenario build ----------

    Scenario build_scenario(const std::vector<Node> &nodes, const RadioParams &radio, const RawCirMap &rawcirs,
                            double ts, const BuildOptions &options, Diagnostics *diag)
    {
        if (!(ts > 0.0))
            throw std::invalid_argument("build_scenario: sampling interval must be positive.");
        if (!(options.update_interval > 0.0))
            throw std::invalid_argument("build_scenario: update interval must be positive.");
        if (rawcirs.empty())
            throw std::invalid_argument("build_scenario: no channel samples.");
        radio.validate();

        std::set<int> ids;
        for (const auto &n : nodes)
        {
            n.validate();
            if (!ids.insert(n.id).second)
                throw std::invalid_argument("build_scenario: duplicate node id " + std::to_string(n.id) + ".");
        }
        if (ids.size() < 2)
            throw std::invalid_argument("build_scenario: at least two nodes are required.");

        std::set<double> times;
        for (const auto &[key, cir] : rawcirs)
        {
            if (!ids.contains(key.tx) || !ids.contains(key.rx))
                throw std::invalid_argument("build_scenario: channel sample for unknown link " +
                                            to_string(LinkId{key.tx, key.rx}) + ".");
            times.insert(key.t);
        }
        const double t_first = *times.begin();
        const double t_last = *times.rbegin();
        const auto sample_count = static_cast<std::size_t>(std::llround((t_last - t_first) / ts)) + 1;
        const double tol = 1e-6 * ts;
        for (double t : times)
        {
            const double k = (t - t_first) / ts;
            if (std::abs(k - std::round(k)) * ts > tol)
                throw std::invalid_argument("build_scenario: timestamp " + std::to_string(t) +
                                            " is not on the sampling grid of " + std::to_string(ts) + " s.");
        }

        std::vector<LinkId> links;
        for (int tx : ids)
            for (int rx : ids)
                if (tx != rx)
                    links.push_back({tx, rx});

        // Resolve every (link, sample) to its RawCir before doing any work.
        std::vector<std::vector<const RawCir *>> samples(links.size(), std::vector<const RawCir *>(sample_count));
        for (std::size_t l = 0; l < links.size(); ++l)
            for (std::size_t k = 0; k < sample_count; ++k)
            {
                const double t = t_first + static_cast<double>(k) * ts;
                auto it = rawcirs.lower_bound({links[l].tx, links[l].rx, t - tol});
                if (it == rawcirs.end() || it->first.tx != links[l].tx || it->first.rx != links[l].rx ||
                    std::abs(it->first.t - t) > tol)
                    throw std::invalid_argument("build_scenario: missing channel sample for link " + to_string(links[l]) +
                                                " at t=" + std::to_string(t) + ".");
                samples[l][k] = &it->second;
            }

        for (const auto &n : nodes)
            if (n.kind == NodeKind::Mobile && n.speed * ts > 15.0)
                warn(diag, "Node " + std::to_string(n.id) + " moves " + std::to_string(n.speed * ts) +
                               " m per channel sample, more than the 15 m coherence distance.");

        const auto frame_count = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(static_cast<double>(sample_count) * ts / options.update_interval)));

        std::vector<CirTimeline> timelines(links.size());
        std::vector<Diagnostics> link_diag(links.size());
        parallel_for(links.size(), resolve_thread_count(options.threads),
                     [&](std::size_t l)
                     {
                         std::vector<QuantizedCir> q;
                         q.reserve(sample_count);
                         for (std::size_t k = 0; k < sample_count; ++k)
                             q.push_back(quantize_taps(*samples[l][k], options.quantize, &link_diag[l]));
                         CirTimeline &tl = timelines[l];
                         tl.update_interval = options.update_interval;
                         tl.frames.reserve(frame_count);
                         tl.propagation_delays.reserve(frame_count);
                         for (std::size_t f = 0; f < frame_count; ++f)
                         {
                             const double t = static_cast<double>(f) * options.update_interval;
                             const auto k = std::min(sample_count - 1,
                                                     static_cast<std::size_t>(std::floor(t / ts + 1e-9)));
                             tl.frames.push_back(q[k].taps);
                             tl.propagation_delays.push_back(q[k].propagation_delay);
                         }
                     });

        ScenarioMetadata meta;
        meta.name = options.name;
        meta.grid = options.quantize.grid;
        std::ostringstream num;
        num << std::setprecision(17);
        auto fmt = [&num](double v)
        {
            num.str({});
            num << v;
            return num.str();
        };
        meta.creation["sampling_interval_s"] = fmt(ts);
        meta.creation["update_interval_s"] = fmt(options.update_interval);
        meta.creation["channel_samples"] = std::to_string(sample_count);
        meta.creation["first_timestamp_s"] = fmt(t_first);
        meta.creation["quantizer"] = "kmeans1d-power-weighted";
        meta.creation["quantizer_seed"] = std::to_string(options.quantize.seed);
        meta.creation["quantizer_max_iterations"] = std::to_string(options.quantize.max_iterations);
        for (auto &d : link_diag)
            for (auto &w : d.warnings)
            {
                warn(diag, w);
                meta.warnings.push_back(std::move(w));
            }
        if (diag != nullptr)
            for (const auto &w : diag->warnings)
                if (std::find(meta.warnings.begin(), meta.warnings.end(), w) == meta.warnings.end())
                    meta.warnings.push_back(w);

        std::map<LinkId, CirTimeline> link_map;
        for (std::size_t l = 0; l < links.size(); ++l)
            link_map.emplace(links[l], std::move(timelines[l]));
        return Scenario(nodes, radio, ts, std::move(link_map), std::move(meta));
    }

    // ---------- Path loss ----------

    PathLossMatrix pathloss_matrix(const Scenario &scenario, std::size_t frame)
    {
        if (frame >= scenario.frame_count())
            throw std::invalid_argument("pathloss_matrix: frame " + std::to_string(frame) + " outside timeline of " +
                                        std::to_string(scenario.frame_count()) + " frames.");
        PathLossMatrix m;
        m.node_ids = scenario.node_ids();
        const std::size_t n = m.node_ids.size();
        m.loss_db.assign(n, std::vector<double>(n, std::numeric_limits<double>::quiet_NaN()));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
            {
                if (i == j)
                    continue;
                const double p = scenario.link(m.node_ids[i], m.node_ids[j]).frames[frame].total_power();
                m.loss_db[i][j] = p > 0.0 ? -10.0 * std::log10(p) : std::numeric_limits<double>::infinity();
            }
        return m;
    }

    void write_matrix_csv(std::ostream &out, const PathLossMatrix &m)
    {
        out << "tx\\rx";
        for (int id : m.node_ids)
            out << ',' << id;
        out << '\n' << std::setprecision(10);
        for (std::size_t i = 0; i < m.node_ids.size(); ++i)
        {
            out << m.node_ids[i];
            for (double v : m.loss_db[i])
            {
                out << ',';
                if (std::isnan(v))
                    out << "";
                else if (std::isinf(v))
                    out << "inf";
                else
                    out << v;
            }
            out << '\n';
        }
    }

} // namespace twinchan
