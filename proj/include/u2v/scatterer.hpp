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

#ifndef U2V_SCATTERER_HPP
#define U2V_SCATTERER_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "u2v/core.hpp"

namespace u2v::scatter
{
    // Raw non-negative per-voxel scatterer estimates, as produced by a predictor
    struct RawPredictionGrid
    {
        Roi roi;
        std::vector<double> values;

        RawPredictionGrid() = default;
        RawPredictionGrid(const Roi &r, std::vector<double> v);
    };

    // Integer scatterer count per voxel
    struct ScattererGrid
    {
        Roi roi;
        std::vector<std::uint32_t> counts;

        ScattererGrid() = default;
        explicit ScattererGrid(const Roi &r) : roi(r), counts(r.voxel_count(), 0) {}
        ScattererGrid(const Roi &r, std::vector<std::uint32_t> c);

        std::uint32_t &at(const VoxelIndex &idx) { return counts[roi.flat(idx)]; }
        std::uint32_t at(const VoxelIndex &idx) const { return counts[roi.flat(idx)]; }
        std::uint64_t total() const;
        std::size_t occupied() const;

        friend bool operator==(const ScattererGrid &, const ScattererGrid &) = default;
    };

    struct MetricsReport
    {
        std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
        double precision = 0.0, recall = 0.0, f1 = 0.0;
        // Set when the corresponding denominator was zero and the metric was defined as 0
        bool precision_degenerate = false, recall_degenerate = false, f1_degenerate = false;
        // Not an occupancy metric: mean |pred - truth| count error over all voxels
        double mean_abs_count_error = 0.0;

        std::uint64_t total() const { return tp + fp + fn + tn; }
    };

    // 2PR / (P + R); 0 when P + R == 0
    double f1_score(double precision, double recall);

    // Threshold rounding: floor(O) + 1 if frac(O) >= threshold, else floor(O). threshold must lie in (0, 1].
    ScattererGrid round_predictions(const RawPredictionGrid &raw, double round_threshold);
    std::uint32_t round_value(double raw, double round_threshold);

    // Occupancy confusion counts (value != 0) and derived precision/recall/F1
    MetricsReport evaluate(const ScattererGrid &pred, const ScattererGrid &truth);

    // Pool confusion counts of all reports, then recompute the metrics
    MetricsReport micro_average(std::span<const MetricsReport> reports);
    // Average per-report precision/recall/F1; counts are summed
    MetricsReport macro_average(std::span<const MetricsReport> reports);

    // ----- baseline predictor ----------------------------------------------

    struct BaselineParams
    {
        double alpha = 1.0;
        double beta = 1.0;
        double d_norm = 100.0; // [m]
        double round_threshold = 0.5;
    };

    // O(v) = alpha * density(v) * exp(-beta * (D_Tx(v) + D_Rx(v)) / d_norm) on a 3-channel feature grid
    RawPredictionGrid baseline_predict(const VoxelGrid &features, const BaselineParams &params);

    struct CalibrationLattice
    {
        std::vector<double> alphas;
        std::vector<double> betas;
        std::vector<double> round_thresholds;
        double d_norm = 100.0;

        static CalibrationLattice standard();
    };

    using TrainingPair = std::pair<VoxelGrid, ScattererGrid>;

    // Exhaustive search minimizing the mean squared count error of the rounded prediction.
    // Ties keep the first lattice point in (alpha, beta, threshold) order.
    BaselineParams calibrate_baseline(std::span<const TrainingPair> training, const CalibrationLattice &lattice);

    // ----- predictor selection ---------------------------------------------

    enum class PredictorKind
    {
        file,
        baseline
    };

    struct PredictorSpec
    {
        PredictorKind kind = PredictorKind::baseline;
        BaselineParams params;
        bool calibrate = false;
    };

    // ----- VXG boundary -----------------------------------------------------

    // Single-channel VXG; rejects other channel counts and (if given) a different ROI
    RawPredictionGrid load_predictions(const std::filesystem::path &path, const std::optional<Roi> &expected = {});
    void store_predictions(const RawPredictionGrid &grid, const std::filesystem::path &path);

    ScattererGrid load_scatterers(const std::filesystem::path &path, const std::optional<Roi> &expected = {});
    void store_scatterers(const ScattererGrid &grid, const std::filesystem::path &path);
}

#endif
