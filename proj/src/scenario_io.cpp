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

#include "twinchan/scenario_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace twinchan
{
    static_assert(std::endian::native == std::endian::little, "bundle I/O assumes a little-endian host");

    namespace
    {
        using json = nlohmann::json;

        constexpr char kMagic[4] = {'T', 'W', 'S', 'C'};
        constexpr std::uint64_t kMaxHeaderBytes = 1ull << 30;

        template <typename T>
        void put(std::vector<std::uint8_t> &buf, T v)
        {
            std::uint8_t raw[sizeof(T)];
            std::memcpy(raw, &v, sizeof(T));
            buf.insert(buf.end(), raw, raw + sizeof(T));
        }

        class Reader
        {
        public:
            explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

            template <typename T>
            T get(const char *what)
            {
                if (pos_ + sizeof(T) > bytes_.size())
                    throw std::invalid_argument(std::string("Scenario bundle truncated while reading ") + what + ".");
                T v;
                std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
                pos_ += sizeof(T);
                return v;
            }

            bool done() const { return pos_ == bytes_.size(); }

        private:
            std::span<const std::uint8_t> bytes_;
            std::size_t pos_ = 0;
        };

        void put_tapset(std::vector<std::uint8_t> &buf, const TapSet &taps)
        {
            put<std::uint32_t>(buf, static_cast<std::uint32_t>(taps.size()));
            for (const auto &t : taps.taps())
            {
                put<std::uint32_t>(buf, static_cast<std::uint32_t>(t.delay_slot));
                put<double>(buf, t.gain.real());
                put<double>(buf, t.gain.imag());
            }
        }

        TapSet get_tapset(Reader &r, int slot_count)
        {
            const auto n = r.get<std::uint32_t>("tap count");
            if (n > static_cast<std::uint32_t>(slot_count))
                throw std::invalid_argument("Scenario bundle: tap count " + std::to_string(n) + " exceeds the grid.");
            std::vector<Tap> taps(n);
            for (auto &t : taps)
            {
                t.delay_slot = static_cast<int>(r.get<std::uint32_t>("tap slot"));
                const double re = r.get<double>("tap gain");
                const double im = r.get<double>("tap gain");
                t.gain = {re, im};
            }
            return TapSet(std::move(taps), slot_count);
        }

        json vec_to_json(const Vec3 &v) { return json::array({v.x, v.y, v.z}); }

        Vec3 vec_from_json(const json &j, const std::string &what)
        {
            if (!j.is_array() || j.size() != 3)
                throw std::invalid_argument(what + " must be an [x, y, z] array.");
            return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
        }
    } // namespace

    json to_json(const RadioParams &radio)
    {
        return json{{"tx_power_db", radio.tx_power_db},       {"tx_gain_db", radio.tx_gain_db},
                    {"rx_gain_db", radio.rx_gain_db},         {"center_freq_hz", radio.center_freq_hz},
                    {"noise_floor_db", radio.noise_floor_db}, {"base_loss_db", radio.base_loss_db}};
    }

    RadioParams radio_from_json(const json &j)
    {
        if (!j.is_object())
            throw std::invalid_argument("radio must be a JSON object.");
        RadioParams r;
        r.tx_power_db = j.value("tx_power_db", r.tx_power_db);
        r.tx_gain_db = j.value("tx_gain_db", r.tx_gain_db);
        r.rx_gain_db = j.value("rx_gain_db", r.rx_gain_db);
        r.center_freq_hz = j.value("center_freq_hz", r.center_freq_hz);
        r.noise_floor_db = j.value("noise_floor_db", r.noise_floor_db);
        r.base_loss_db = j.value("base_loss_db", r.base_loss_db);
        r.validate();
        return r;
    }

    json to_json(const Node &node)
    {
        json j{{"id", node.id}, {"kind", to_string(node.kind)}, {"position", vec_to_json(node.position)},
               {"speed", node.speed}};
        json traj = json::array();
        for (const auto &w : node.trajectory)
            traj.push_back(vec_to_json(w));
        j["trajectory"] = traj;
        return j;
    }

    Node node_from_json(const json &j)
    {
        if (!j.is_object() || !j.contains("id"))
            throw std::invalid_argument("Each node must be an object with an \"id\".");
        Node n;
        n.id = j.at("id").get<int>();
        const std::string who = "node " + std::to_string(n.id);
        n.kind = node_kind_from_string(j.value("kind", std::string("static")));
        if (j.contains("position"))
            n.position = vec_from_json(j.at("position"), who + " position");
        n.speed = j.value("speed", 0.0);
        if (j.contains("trajectory"))
            for (const auto &w : j.at("trajectory"))
                n.trajectory.push_back(vec_from_json(w, who + " waypoint"));
        if (n.kind == NodeKind::Mobile && !n.trajectory.empty() && !j.contains("position"))
            n.position = n.trajectory.front();
        n.validate();
        return n;
    }

    json scenario_header(const Scenario &scenario)
    {
        const auto &meta = scenario.metadata();
        json nodes = json::array();
        for (const auto &n : scenario.nodes())
            nodes.push_back(to_json(n));
        json links = json::array();
        for (const auto &[id, tl] : scenario.links())
            links.push_back(json::array({id.tx, id.rx}));
        return json{{"format", "twsc"},
                    {"version", kBundleVersion},
                    {"name", meta.name},
                    {"radio", to_json(scenario.radio())},
                    {"sampling_interval_s", scenario.sampling_interval()},
                    {"update_interval_s", scenario.update_interval()},
                    {"frame_count", scenario.frame_count()},
                    {"grid", {{"slot_width_s", meta.grid.slot_width}, {"slot_count", meta.grid.slot_count}}},
                    {"coherence_distance_m", meta.coherence_distance_m},
                    {"creation", meta.creation},
                    {"warnings", meta.warnings},
                    {"nodes", nodes},
                    {"links", links},
                    {"layout", "per link in links order, per frame: f64 propagation_delay_s, u32 n_taps, "
                               "n_taps x (u32 slot, f64 re, f64 im); little-endian"}};
    }

    void write_scenario(std::ostream &out, const Scenario &scenario)
    {
        const std::string header = scenario_header(scenario).dump();
        std::vector<std::uint8_t> buf(kMagic, kMagic + 4);
        put<std::uint32_t>(buf, kBundleVersion);
        put<std::uint64_t>(buf, header.size());
        buf.insert(buf.end(), header.begin(), header.end());
        for (const auto &[id, tl] : scenario.links())
            for (std::size_t f = 0; f < tl.frame_count(); ++f)
            {
                put<double>(buf, tl.propagation_delays.empty() ? 0.0 : tl.propagation_delays[f]);
                put_tapset(buf, tl.frames[f]);
            }
        out.write(reinterpret_cast<const char *>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (!out)
            throw std::runtime_error("Failed to write scenario bundle.");
    }

    Scenario read_scenario(std::istream &in)
    {
        char magic[4];
        if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
            throw std::invalid_argument("Not a scenario bundle (bad magic).");
        std::uint32_t version = 0;
        std::uint64_t header_bytes = 0;
        in.read(reinterpret_cast<char *>(&version), sizeof version);
        in.read(reinterpret_cast<char *>(&header_bytes), sizeof header_bytes);
        if (!in)
            throw std::invalid_argument("Scenario bundle truncated in preamble.");
        if (version != kBundleVersion)
            throw std::invalid_argument("Unsupported scenario bundle version " + std::to_string(version) + ".");
        if (header_bytes > kMaxHeaderBytes)
            throw std::invalid_argument("Scenario bundle header is implausibly large.");
        std::string header_text(header_bytes, '\0');
        if (!in.read(header_text.data(), static_cast<std::streamsize>(header_bytes)))
            throw std::invalid_argument("Scenario bundle truncated in header.");
        std::vector<std::uint8_t> payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

        json h;
        try
        {
            h = json::parse(header_text);
        }
        catch (const json::exception &e)
        {
            throw std::invalid_argument(std::string("Scenario bundle header is not valid JSON: ") + e.what());
        }

        try
        {
            ScenarioMetadata meta;
            meta.name = h.at("name").get<std::string>();
            meta.grid.slot_width = h.at("grid").at("slot_width_s").get<double>();
            meta.grid.slot_count = h.at("grid").at("slot_count").get<int>();
            meta.coherence_distance_m = h.at("coherence_distance_m").get<double>();
            meta.creation = h.at("creation").get<std::map<std::string, std::string>>();
            meta.warnings = h.at("warnings").get<std::vector<std::string>>();

            std::vector<Node> nodes;
            for (const auto &n : h.at("nodes"))
                nodes.push_back(node_from_json(n));
            const auto radio = radio_from_json(h.at("radio"));
            const double ts = h.at("sampling_interval_s").get<double>();
            const double interval = h.at("update_interval_s").get<double>();
            const auto frames = h.at("frame_count").get<std::size_t>();

            Reader r(payload);
            std::map<LinkId, CirTimeline> links;
            for (const auto &l : h.at("links"))
            {
                CirTimeline tl;
                tl.update_interval = interval;
                tl.frames.reserve(frames);
                tl.propagation_delays.reserve(frames);
                for (std::size_t f = 0; f < frames; ++f)
                {
                    tl.propagation_delays.push_back(r.get<double>("propagation delay"));
                    tl.frames.push_back(get_tapset(r, meta.grid.slot_count));
                }
                links.emplace(LinkId{l.at(0).get<int>(), l.at(1).get<int>()}, std::move(tl));
            }
            if (!r.done())
                throw std::invalid_argument("Scenario bundle has trailing bytes after the last frame.");
            return Scenario(std::move(nodes), radio, ts, std::move(links), std::move(meta));
        }
        catch (const json::exception &e)
        {
            throw std::invalid_argument(std::string("Scenario bundle header is missing a field: ") + e.what());
        }
    }

    void save_scenario(const std::filesystem::path &path, const Scenario &scenario)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("Cannot open " + path.string() + " for writing.");
        write_scenario(out, scenario);
    }

    Scenario load_scenario(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::invalid_argument("Cannot open scenario bundle " + path.string() + ".");
        return read_scenario(in);
    }

    std::vector<std::uint8_t> encode_tapset(const TapSet &taps)
    {
        std::vector<std::uint8_t> buf;
        put_tapset(buf, taps);
        return buf;
    }

    TapSet decode_tapset(std::span<const std::uint8_t> bytes, int slot_count)
    {
        Reader r(bytes);
        auto taps = get_tapset(r, slot_count);
        if (!r.done())
            throw std::invalid_argument("decode_tapset: trailing bytes.");
        return taps;
    }

    NodesFile read_nodes_json(std::istream &in)
    {
        json j;
        try
        {
            j = json::parse(in);
        }
        catch (const json::exception &e)
        {
            throw std::invalid_argument(std::string("Nodes file is not valid JSON: ") + e.what());
        }
        try
        {
            NodesFile f;
            f.name = j.value("name", f.name);
            f.sampling_interval = j.value("sampling_interval_s", f.sampling_interval);
            if (j.contains("radio"))
                f.radio = radio_from_json(j.at("radio"));
            for (const auto &n : j.at("nodes"))
                f.nodes.push_back(node_from_json(n));
            return f;
        }
        catch (const json::exception &e)
        {
            throw std::invalid_argument(std::string("Nodes file: ") + e.what());
        }
    }

    void write_nodes_json(std::ostream &out, const NodesFile &file)
    {
        json nodes = json::array();
        for (const auto &n : file.nodes)
            nodes.push_back(to_json(n));
        json j{{"name", file.name},
               {"sampling_interval_s", file.sampling_interval},
               {"radio", to_json(file.radio)},
               {"nodes", nodes}};
        out << j.dump(2) << '\n';
    }

} // namespace twinchan
