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

#ifndef U2V_MANIFEST_HPP
#define U2V_MANIFEST_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "u2v/channel.hpp"
#include "u2v/lidar.hpp"
#include "u2v/scatterer.hpp"
#include "u2v/stats.hpp"

namespace u2v
{
    // Per-snapshot file names; "{i}" expands to the zero-padded 4-digit snapshot index.
    // Relative paths are resolved against the manifest directory.
    struct FileRoles
    {
        std::filesystem::path tx_trajectory;
        std::filesystem::path rx_trajectory;
        std::string tx_clouds;
        std::string rx_clouds;
        lidar::Frame cloud_frame = lidar::Frame::sensor_local;
        std::string truth_grids;      // optional
        std::string prediction_grids; // required when the predictor kind is "file"
    };

    enum class StatsEstimator
    {
        ensemble,
        time_average
    };

    struct StatsConfig
    {
        std::size_t realizations = 50;
        std::vector<double> anchor_times;        // default: first snapshot
        std::size_t max_lag = 100;               // TACF lags in snapshots
        std::vector<double> fcf_frequencies;     // FCF anchor frequencies; default: carrier
        double fcf_span_hz = 100e6;
        std::size_t fcf_points = 101;
        stats::Taper taper = stats::Taper::rectangular;
        StatsEstimator estimator = StatsEstimator::ensemble;
        std::size_t transfer_points = 64;
    };

    struct ScenarioManifest
    {
        std::filesystem::path source;   // manifest file
        std::filesystem::path base_dir; // for relative paths

        std::size_t snapshots = 0;
        double dt = 0.0;
        double start_time = 0.0;
        std::uint64_t seed = 0;
        lidar::TransformConvention convention = lidar::TransformConvention::paper;
        lidar::FilterConfig filter;            // ROI and H_t
        double cluster_height = 3.0;           // H_c
        std::optional<double> match_radius;    // default: voxel diagonal
        channel::ChannelModelConfig channel;
        scatter::PredictorSpec predictor;
        FileRoles files;
        StatsConfig stats;

        double snapshot_time(std::size_t i) const { return start_time + static_cast<double>(i) * dt; }
        double effective_match_radius() const { return match_radius.value_or(filter.roi.voxel_diagonal()); }
        std::filesystem::path resolve(const std::filesystem::path &p) const;
        std::filesystem::path resolve(const std::string &pattern, std::size_t index) const;
    };

    std::string expand_pattern(const std::string &pattern, std::size_t index);

    // Reads and validates a manifest. Throws ConfigError naming the offending key (and line),
    // IoError when the file cannot be read.
    ScenarioManifest parse_manifest(const std::filesystem::path &path);
    ScenarioManifest parse_manifest_text(const std::string &text, const std::filesystem::path &base_dir,
                                         const std::string &source_name = "<manifest>",
                                         bool check_files = true);
}

#endif
