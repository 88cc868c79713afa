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

#ifndef U2V_PIPELINE_HPP
#define U2V_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "u2v/channel.hpp"
#include "u2v/clusters.hpp"
#include "u2v/manifest.hpp"
#include "u2v/scatterer.hpp"

namespace u2v::pipeline
{
    struct RunOptions
    {
        std::filesystem::path out_dir = ".";
        std::optional<std::uint64_t> seed; // overrides the manifest seed
        std::size_t jobs = 1;
    };

    enum class Goal
    {
        preprocess, // features/features_{i}.vxg
        predict,    // predictions/pred_{i}.vxg, scatterers/scat_{i}.vxg
        evaluate,   // metrics.csv
        simulate,   // everything below plus metrics.csv when truth grids are declared
        stats       // tacf/fcf/dpsd CSVs only
    };

    // Stage outputs, kept in memory so tests can inspect them
    struct Trace
    {
        std::vector<VoxelGrid> features;
        std::vector<scatter::RawPredictionGrid> raw_predictions;
        scatter::BaselineParams params;
        bool calibrated = false;
        std::vector<scatter::ScattererGrid> scatterers;
        std::vector<scatter::MetricsReport> metrics;
        std::vector<clusters::ClusterSet> clusters;
        std::vector<clusters::ClusterTrack> tracks;
    };

    std::uint64_t effective_seed(const ScenarioManifest &m, const RunOptions &options);

    // Snapshot times on the manifest grid
    std::vector<double> snapshot_times(const ScenarioManifest &m);

    // Runs the stages needed for `goal` and writes its outputs under options.out_dir.
    // Failures inside a stage surface as StageError naming it; output write failures as IoError.
    Trace run(const ScenarioManifest &m, const RunOptions &options, Goal goal);

    // One row per report plus micro and macro aggregate rows.
    void write_metrics_csv(std::ostream &os, std::span<const scatter::MetricsReport> reports,
                           std::span<const std::string> labels, std::span<const std::string> splits);

    // Single metrics row (header included) for a prediction/truth file pair.
    std::string evaluate_files(const std::filesystem::path &pred, const std::filesystem::path &truth,
                               double round_threshold);
}

#endif
