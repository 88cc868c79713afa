// SPDX-License-Identifier: Apache-2.0
//
// u2v-chansim: LiDAR-aided UAV-to-vehicle channel simulation toolkit
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

#include "u2v/manifest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "u2v/csv.hpp"

namespace u2v
{
    namespace
    {
        const std::map<std::string, std::set<std::string>> &known_keys()
        {
            static const std::map<std::string, std::set<std::string>> keys = {
                {"scenario", {"snapshots", "dt", "start_time", "seed", "transform_convention", "height_threshold",
                              "cluster_height", "match_radius", "cluster_amplitude_mode"}},
                {"roi", {"x_min", "x_max", "y_min", "y_max", "z_min", "z_max", "g_x", "g_y", "g_z"}},
                {"rf", {"carrier_hz", "bandwidth_hz", "chi", "ricean", "eta_gr", "t0", "t_end"}},
                {"stochastic", {"xi", "eta", "sigma_e_db", "virtual_delay_rate", "gamma"}},
                {"files", {"tx_trajectory", "rx_trajectory", "tx_clouds", "rx_clouds", "cloud_frame", "truth_grids",
                           "prediction_grids"}},
                {"predictor", {"kind", "alpha", "beta", "d_norm", "round_threshold", "calibrate"}},
                {"stats", {"realizations", "anchor_times", "max_lag", "fcf_frequencies", "fcf_span_hz", "fcf_points",
                           "taper", "estimator", "transfer_points"}},
            };
            return keys;
        }

        std::string trim(std::string_view s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string_view::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return std::string(s.substr(b, e - b + 1));
        }

        struct Entry
        {
            std::string value;
            std::size_t line = 0;
        };

        class Ini
        {
        public:
            Ini(const std::string &text, std::string source) : source_(std::move(source))
            {
                std::istringstream is(text);
                std::string raw;
                std::string section;
                std::size_t line_no = 0;
                while (std::getline(is, raw))
                {
                    ++line_no;
                    std::string line = raw;
                    if (const auto hash = line.find('#'); hash != std::string::npos)
                        line.erase(hash);
                    line = trim(line);
                    if (line.empty())
                        continue;
                    if (line.front() == '[')
                    {
                        if (line.back() != ']')
                            fail(line_no, "malformed section header");
                        section = trim(std::string_view(line).substr(1, line.size() - 2));
                        if (!known_keys().contains(section))
                            fail(line_no, "unknown section [" + section + "]");
                        continue;
                    }
                    const auto eq = line.find('=');
                    if (eq == std::string::npos)
                        fail(line_no, "expected key = value");
                    if (section.empty())
                        fail(line_no, "key outside of any section");
                    const std::string key = trim(std::string_view(line).substr(0, eq));
                    const std::string value = trim(std::string_view(line).substr(eq + 1));
                    if (!known_keys().at(section).contains(key))
                        fail(line_no, "unknown key '" + key + "' in [" + section + "]");
                    if (!entries_[section].emplace(key, Entry{value, line_no}).second)
                        fail(line_no, "duplicate key '" + key + "' in [" + section + "]");
                }
            }

            [[noreturn]] void fail(std::size_t line, const std::string &msg) const
            {
                throw ConfigError(source_ + ":" + std::to_string(line) + ": " + msg);
            }

            [[noreturn]] void fail_key(const std::string &section, const std::string &key, const std::string &msg) const
            {
                const Entry *e = find(section, key);
                if (e)
                    fail(e->line, section + "." + key + ": " + msg);
                throw ConfigError(source_ + ": " + section + "." + key + ": " + msg);
            }

            const Entry *find(const std::string &section, const std::string &key) const
            {
                auto s = entries_.find(section);
                if (s == entries_.end())
                    return nullptr;
                auto k = s->second.find(key);
                return k == s->second.end() ? nullptr : &k->second;
            }

            bool has(const std::string &section, const std::string &key) const { return find(section, key) != nullptr; }

            const std::string &required(const std::string &section, const std::string &key) const
            {
                const Entry *e = find(section, key);
                if (!e)
                    throw ConfigError(source_ + ": missing required key " + section + "." + key);
                return e->value;
            }

            double number(const std::string &section, const std::string &key, std::optional<double> fallback) const
            {
                const Entry *e = find(section, key);
                if (!e)
                {
                    if (!fallback)
                        required(section, key);
                    return *fallback;
                }
                return to_double(section, key, e->value);
            }

            double to_double(const std::string &section, const std::string &key, const std::string &text) const
            {
                double v = 0.0;
                auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
                if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
                    fail_key(section, key, "expected a finite number, got '" + text + "'");
                return v;
            }

            std::uint64_t integer(const std::string &section, const std::string &key, std::optional<std::uint64_t> fallback) const
            {
                const Entry *e = find(section, key);
                if (!e)
                {
                    if (!fallback)
                        required(section, key);
                    return *fallback;
                }
                std::uint64_t v = 0;
                const auto &t = e->value;
                auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
                if (ec != std::errc() || ptr != t.data() + t.size())
                    fail_key(section, key, "expected a non-negative integer, got '" + t + "'");
                return v;
            }

            std::string text(const std::string &section, const std::string &key, const std::string &fallback) const
            {
                const Entry *e = find(section, key);
                return e ? e->value : fallback;
            }

            std::vector<double> list(const std::string &section, const std::string &key) const
            {
                std::vector<double> out;
                const Entry *e = find(section, key);
                if (!e)
                    return out;
                for (auto field : csv::split(e->value))
                    out.push_back(to_double(section, key, std::string(field)));
                return out;
            }

            template <typename T>
            T choice(const std::string &section, const std::string &key, const std::map<std::string, T> &options,
                     T fallback) const
            {
                const Entry *e = find(section, key);
                if (!e)
                    return fallback;
                auto it = options.find(e->value);
                if (it == options.end())
                {
                    std::string allowed;
                    for (const auto &[name, _] : options)
                        allowed += (allowed.empty() ? "" : "|") + name;
                    fail_key(section, key, "expected one of " + allowed + ", got '" + e->value + "'");
                }
                return it->second;
            }

        private:
            std::string source_;
            std::map<std::string, std::map<std::string, Entry>> entries_;
        };
    }

    std::string expand_pattern(const std::string &pattern, std::size_t index)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%04zu", index);
        std::string out = pattern;
        for (auto pos = out.find("{i}"); pos != std::string::npos; pos = out.find("{i}", pos))
        {
            out.replace(pos, 3, buf);
            pos += std::char_traits<char>::length(buf);
        }
        return out;
    }

    std::filesystem::path ScenarioManifest::resolve(const std::filesystem::path &p) const
    {
        return p.is_absolute() ? p : base_dir / p;
    }

    std::filesystem::path ScenarioManifest::resolve(const std::string &pattern, std::size_t index) const
    {
        return resolve(std::filesystem::path(expand_pattern(pattern, index)));
    }

    ScenarioManifest parse_manifest_text(const std::string &text, const std::filesystem::path &base_dir,
                                         const std::string &source_name, bool check_files)
    {
        const Ini ini(text, source_name);
        ScenarioManifest m;
        m.source = source_name;
        m.base_dir = base_dir;

        // [scenario]
        m.snapshots = ini.integer("scenario", "snapshots", std::nullopt);
        if (m.snapshots < 1)
            ini.fail_key("scenario", "snapshots", "must be >= 1");
        m.dt = ini.number("scenario", "dt", std::nullopt);
        if (!(m.dt > 0.0))
            ini.fail_key("scenario", "dt", "must be > 0");
        m.start_time = ini.number("scenario", "start_time", 0.0);
        m.seed = ini.integer("scenario", "seed", 0);
        m.convention = ini.choice<lidar::TransformConvention>(
            "scenario", "transform_convention",
            {{"paper", lidar::TransformConvention::paper}, {"conventional", lidar::TransformConvention::conventional}},
            lidar::TransformConvention::paper);
        m.filter.height_threshold = ini.number("scenario", "height_threshold", 0.5);
        m.cluster_height = ini.number("scenario", "cluster_height", 3.0);
        if (ini.has("scenario", "match_radius") && ini.text("scenario", "match_radius", "") != "auto")
        {
            m.match_radius = ini.number("scenario", "match_radius", std::nullopt);
            if (*m.match_radius < 0.0)
                ini.fail_key("scenario", "match_radius", "must be >= 0");
        }
        m.channel.amplitude_mode = ini.choice<channel::AmplitudeMode>(
            "scenario", "cluster_amplitude_mode",
            {{"linear_count", channel::AmplitudeMode::linear_count}, {"sqrt_count", channel::AmplitudeMode::sqrt_count}},
            channel::AmplitudeMode::linear_count);

        // [roi]
        try
        {
            auto dim = [&](const char *k)
            {
                const auto v = ini.integer("roi", k, std::nullopt);
                if (v < 1)
                    ini.fail_key("roi", k, "must be >= 1");
                return static_cast<std::size_t>(v);
            };
            m.filter.roi = Roi({ini.number("roi", "x_min", std::nullopt), ini.number("roi", "y_min", std::nullopt),
                                ini.number("roi", "z_min", std::nullopt)},
                               {ini.number("roi", "x_max", std::nullopt), ini.number("roi", "y_max", std::nullopt),
                                ini.number("roi", "z_max", std::nullopt)},
                               {dim("g_x"), dim("g_y"), dim("g_z")});
        }
        catch (const ConfigError &e)
        {
            const std::string what = e.what();
            if (what.rfind(source_name, 0) == 0)
                throw;
            throw ConfigError(source_name + ": " + what);
        }

        // [rf]
        auto &rf = m.channel.rf;
        rf.carrier_hz = ini.number("rf", "carrier_hz", 28e9);
        if (!(rf.carrier_hz > 0.0))
            ini.fail_key("rf", "carrier_hz", "must be > 0");
        rf.bandwidth_hz = ini.number("rf", "bandwidth_hz", 2e9);
        if (!(rf.bandwidth_hz >= 0.0))
            ini.fail_key("rf", "bandwidth_hz", "must be >= 0");
        rf.chi = ini.number("rf", "chi", 0.0);
        if (ini.text("rf", "ricean", "3") == "auto")
            rf.ricean.reset();
        else
        {
            rf.ricean = ini.number("rf", "ricean", 3.0);
            if (*rf.ricean < 0.0)
                ini.fail_key("rf", "ricean", "must be >= 0 or 'auto'");
        }
        rf.eta_gr = ini.number("rf", "eta_gr", 0.3);
        if (!(rf.eta_gr >= 0.0 && rf.eta_gr <= 1.0))
            ini.fail_key("rf", "eta_gr", "must lie in [0, 1]");
        rf.window_start = ini.number("rf", "t0", m.start_time);
        rf.window_end = ini.number("rf", "t_end", m.snapshot_time(m.snapshots - 1));
        if (!(rf.window_end >= rf.window_start))
            ini.fail_key("rf", "t_end", "must not precede t0");

        // [stochastic]
        auto &st = m.channel.stochastic;
        st.xi = ini.number("stochastic", "xi", st.xi);
        if (st.xi < 0.0)
            ini.fail_key("stochastic", "xi", "must be >= 0");
        st.eta = ini.number("stochastic", "eta", st.eta);
        st.sigma_e_db = ini.number("stochastic", "sigma_e_db", st.sigma_e_db);
        if (st.sigma_e_db < 0.0)
            ini.fail_key("stochastic", "sigma_e_db", "must be >= 0");
        st.virtual_delay_rate = ini.number("stochastic", "virtual_delay_rate", st.virtual_delay_rate);
        if (!(st.virtual_delay_rate > 0.0))
            ini.fail_key("stochastic", "virtual_delay_rate", "must be > 0");
        m.channel.ground.reflection_coefficient = ini.number("stochastic", "gamma", 0.5);
        if (!(m.channel.ground.reflection_coefficient >= 0.0 && m.channel.ground.reflection_coefficient <= 1.0))
            ini.fail_key("stochastic", "gamma", "must lie in [0, 1]");

        // [predictor]
        auto &pred = m.predictor;
        pred.kind = ini.choice<scatter::PredictorKind>(
            "predictor", "kind", {{"baseline", scatter::PredictorKind::baseline}, {"file", scatter::PredictorKind::file}},
            scatter::PredictorKind::baseline);
        pred.params.alpha = ini.number("predictor", "alpha", 1.0);
        pred.params.beta = ini.number("predictor", "beta", 1.0);
        pred.params.d_norm = ini.number("predictor", "d_norm", 100.0);
        pred.params.round_threshold = ini.number("predictor", "round_threshold", 0.5);
        pred.calibrate = ini.choice<bool>("predictor", "calibrate", {{"true", true}, {"false", false}}, false);
        if (pred.params.alpha < 0.0)
            ini.fail_key("predictor", "alpha", "must be >= 0");
        if (pred.params.beta < 0.0)
            ini.fail_key("predictor", "beta", "must be >= 0");
        if (!(pred.params.d_norm > 0.0))
            ini.fail_key("predictor", "d_norm", "must be > 0");
        if (!(pred.params.round_threshold > 0.0 && pred.params.round_threshold <= 1.0))
            ini.fail_key("predictor", "round_threshold", "must lie in (0, 1]");

        // [files]
        auto &f = m.files;
        f.tx_trajectory = ini.required("files", "tx_trajectory");
        f.rx_trajectory = ini.required("files", "rx_trajectory");
        f.tx_clouds = ini.required("files", "tx_clouds");
        f.rx_clouds = ini.required("files", "rx_clouds");
        f.cloud_frame = ini.choice<lidar::Frame>("files", "cloud_frame",
                                                 {{"local", lidar::Frame::sensor_local}, {"world", lidar::Frame::world}},
                                                 lidar::Frame::sensor_local);
        f.truth_grids = ini.text("files", "truth_grids", "");
        f.prediction_grids = ini.text("files", "prediction_grids", "");
        if (pred.kind == scatter::PredictorKind::file && f.prediction_grids.empty())
            ini.fail_key("files", "prediction_grids", "required when predictor.kind = file");
        if (pred.calibrate && f.truth_grids.empty())
            ini.fail_key("files", "truth_grids", "required when predictor.calibrate = true");

        // [stats]
        auto &s = m.stats;
        s.realizations = ini.integer("stats", "realizations", 50);
        if (s.realizations < 1)
            ini.fail_key("stats", "realizations", "must be >= 1");
        s.anchor_times = ini.list("stats", "anchor_times");
        if (s.anchor_times.empty())
            s.anchor_times.push_back(m.start_time);
        s.max_lag = ini.integer("stats", "max_lag", 100);
        s.fcf_frequencies = ini.list("stats", "fcf_frequencies");
        if (s.fcf_frequencies.empty())
            s.fcf_frequencies.push_back(rf.carrier_hz);
        for (double fa : s.fcf_frequencies)
            if (!(fa > 0.0))
                ini.fail_key("stats", "fcf_frequencies", "frequencies must be > 0");
        s.fcf_span_hz = ini.number("stats", "fcf_span_hz", 100e6);
        if (!(s.fcf_span_hz > 0.0))
            ini.fail_key("stats", "fcf_span_hz", "must be > 0");
        s.fcf_points = ini.integer("stats", "fcf_points", 101);
        if (s.fcf_points < 2)
            ini.fail_key("stats", "fcf_points", "must be >= 2");
        s.taper = ini.choice<stats::Taper>("stats", "taper",
                                           {{"rectangular", stats::Taper::rectangular}, {"hann", stats::Taper::hann}},
                                           stats::Taper::rectangular);
        s.estimator = ini.choice<StatsEstimator>(
            "stats", "estimator", {{"ensemble", StatsEstimator::ensemble}, {"time_average", StatsEstimator::time_average}},
            StatsEstimator::ensemble);
        s.transfer_points = ini.integer("stats", "transfer_points", 64);
        if (s.transfer_points < 1)
            ini.fail_key("stats", "transfer_points", "must be >= 1");

        if (check_files)
        {
            auto must_exist = [&](const std::filesystem::path &p, const char *key)
            {
                if (!std::filesystem::exists(m.resolve(p)))
                    ini.fail_key("files", key, "file not found: " + m.resolve(p).string());
            };
            must_exist(f.tx_trajectory, "tx_trajectory");
            must_exist(f.rx_trajectory, "rx_trajectory");
            for (std::size_t i = 0; i < m.snapshots; ++i)
            {
                must_exist(expand_pattern(f.tx_clouds, i), "tx_clouds");
                must_exist(expand_pattern(f.rx_clouds, i), "rx_clouds");
            }
        }
        return m;
    }

    ScenarioManifest parse_manifest(const std::filesystem::path &path)
    {
        std::ifstream is(path);
        if (!is)
            throw IoError("cannot read manifest " + path.string());
        std::stringstream ss;
        ss << is.rdbuf();
        auto base = path.parent_path();
        if (base.empty())
            base = ".";
        return parse_manifest_text(ss.str(), base, path.string());
    }
}
