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

#include "u2v/scatterer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "u2v/lidar.hpp"
#include "u2v/vxg.hpp"

namespace u2v::scatter
{
    RawPredictionGrid::RawPredictionGrid(const Roi &r, std::vector<double> v) : roi(r), values(std::move(v))
    {
        if (values.size() != roi.voxel_count())
            throw UsageError("raw prediction grid: value count does not match ROI");
        for (double x : values)
            if (!(x >= 0.0) || !std::isfinite(x))
                throw DomainError("raw prediction grid: values must be finite and non-negative");
    }

    ScattererGrid::ScattererGrid(const Roi &r, std::vector<std::uint32_t> c) : roi(r), counts(std::move(c))
    {
        if (counts.size() != roi.voxel_count())
            throw UsageError("scatterer grid: count vector does not match ROI");
    }

    std::uint64_t ScattererGrid::total() const
    {
        return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    }

    std::size_t ScattererGrid::occupied() const
    {
        return static_cast<std::size_t>(std::ranges::count_if(counts, [](std::uint32_t c) { return c != 0; }));
    }

    double f1_score(double precision, double recall)
    {
        const double sum = precision + recall;
        return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
    }

    std::uint32_t round_value(double raw, double round_threshold)
    {
        if (!(round_threshold > 0.0 && round_threshold <= 1.0))
            throw ConfigError("round_threshold must lie in (0, 1]");
        const double base = std::floor(raw);
        const double rounded = (raw - base) >= round_threshold ? base + 1.0 : base;
        if (rounded > static_cast<double>(std::numeric_limits<std::uint32_t>::max()))
            throw DomainError("scatterer count exceeds u32 range");
        return static_cast<std::uint32_t>(rounded);
    }

    ScattererGrid round_predictions(const RawPredictionGrid &raw, double round_threshold)
    {
        // frac(O) >= 0 always holds, so threshold 0 would add one scatterer to every voxel
        if (!(round_threshold > 0.0 && round_threshold <= 1.0))
            throw ConfigError("round_threshold must lie in (0, 1]");
        ScattererGrid out(raw.roi);
        for (std::size_t i = 0; i < raw.values.size(); ++i)
            out.counts[i] = round_value(raw.values[i], round_threshold);
        return out;
    }

    namespace
    {
        void finish_ratios(MetricsReport &r)
        {
            r.precision_degenerate = (r.tp + r.fp) == 0;
            r.recall_degenerate = (r.tp + r.fn) == 0;
            r.precision = r.precision_degenerate ? 0.0 : static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
            r.recall = r.recall_degenerate ? 0.0 : static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
            r.f1_degenerate = (r.precision + r.recall) == 0.0;
            r.f1 = f1_score(r.precision, r.recall);
        }
    }

    MetricsReport evaluate(const ScattererGrid &pred, const ScattererGrid &truth)
    {
        if (!(pred.roi == truth.roi) || pred.counts.size() != truth.counts.size())
            throw UsageError("evaluate: prediction and ground truth grids differ in shape or ROI");

        MetricsReport r;
        double abs_err = 0.0;
        for (std::size_t i = 0; i < pred.counts.size(); ++i)
        {
            const bool p = pred.counts[i] != 0;
            const bool t = truth.counts[i] != 0;
            if (t && p)
                ++r.tp;
            else if (!t && p)
                ++r.fp;
            else if (t && !p)
                ++r.fn;
            else
                ++r.tn;
            abs_err += std::abs(static_cast<double>(pred.counts[i]) - static_cast<double>(truth.counts[i]));
        }
        r.mean_abs_count_error = pred.counts.empty() ? 0.0 : abs_err / static_cast<double>(pred.counts.size());
        finish_ratios(r);
        return r;
    }

    MetricsReport micro_average(std::span<const MetricsReport> reports)
    {
        MetricsReport r;
        double weighted_err = 0.0;
        for (const auto &x : reports)
        {
            r.tp += x.tp, r.fp += x.fp, r.fn += x.fn, r.tn += x.tn;
            weighted_err += x.mean_abs_count_error * static_cast<double>(x.total());
        }
        r.mean_abs_count_error = r.total() ? weighted_err / static_cast<double>(r.total()) : 0.0;
        finish_ratios(r);
        return r;
    }

    MetricsReport macro_average(std::span<const MetricsReport> reports)
    {
        MetricsReport r = micro_average(reports);
        if (reports.empty())
            return r;
        double p = 0.0, rc = 0.0, f = 0.0, e = 0.0;
        bool pd = false, rd = false, fd = false;
        for (const auto &x : reports)
        {
            p += x.precision, rc += x.recall, f += x.f1, e += x.mean_abs_count_error;
            pd |= x.precision_degenerate, rd |= x.recall_degenerate, fd |= x.f1_degenerate;
        }
        const double n = static_cast<double>(reports.size());
        r.precision = p / n, r.recall = rc / n, r.f1 = f / n, r.mean_abs_count_error = e / n;
        r.precision_degenerate = pd, r.recall_degenerate = rd, r.f1_degenerate = fd;
        return r;
    }

    // ----- baseline ----------------------------------------------------------

    RawPredictionGrid baseline_predict(const VoxelGrid &features, const BaselineParams &params)
    {
        if (features.channels() != 3)
            throw UsageError("baseline_predict: expected a 3-channel feature grid");
        if (!(params.alpha >= 0.0) || !(params.beta >= 0.0) || !(params.d_norm > 0.0))
            throw ConfigError("baseline_predict: need alpha >= 0, beta >= 0, d_norm > 0");

        const auto density = features.channel(lidar::density_channel);
        const auto d_tx = features.channel(lidar::tx_distance_channel);
        const auto d_rx = features.channel(lidar::rx_distance_channel);
        std::vector<double> out(density.size());
        for (std::size_t i = 0; i < out.size(); ++i)
        {
            const double d = std::max(0.0, density[i]);
            out[i] = d == 0.0 ? 0.0 : params.alpha * d * std::exp(-params.beta * (d_tx[i] + d_rx[i]) / params.d_norm);
        }
        return RawPredictionGrid(features.roi(), std::move(out));
    }

    CalibrationLattice CalibrationLattice::standard()
    {
        CalibrationLattice l;
        for (int i = 0; i <= 16; ++i)
            l.alphas.push_back(0.25 * i);
        for (int i = 0; i <= 8; ++i)
            l.betas.push_back(0.5 * i);
        for (int i = 1; i <= 9; ++i)
            l.round_thresholds.push_back(0.1 * i);
        return l;
    }

    BaselineParams calibrate_baseline(std::span<const TrainingPair> training, const CalibrationLattice &lattice)
    {
        if (training.empty())
            throw UsageError("calibrate_baseline: empty training set");
        if (lattice.alphas.empty() || lattice.betas.empty() || lattice.round_thresholds.empty())
            throw UsageError("calibrate_baseline: empty search lattice");

        if (!(lattice.d_norm > 0.0) || std::ranges::any_of(lattice.alphas, [](double a) { return !(a >= 0.0); }) ||
            std::ranges::any_of(lattice.betas, [](double b) { return !(b >= 0.0); }))
            throw ConfigError("calibrate_baseline: need alpha >= 0, beta >= 0, d_norm > 0");

        // Voxels without density always predict zero, so only occupied ones are revisited per candidate.
        struct Sparse
        {
            std::vector<double> density, distance, truth;
        };
        std::vector<Sparse> sparse(training.size());
        std::size_t voxels = 0;
        double empty_sq = 0.0;
        for (std::size_t k = 0; k < training.size(); ++k)
        {
            const auto &[features, truth] = training[k];
            if (!(features.roi() == truth.roi))
                throw UsageError("calibrate_baseline: feature and truth grids differ in ROI");
            if (features.channels() != 3)
                throw UsageError("calibrate_baseline: expected 3-channel feature grids");
            voxels += truth.counts.size();
            const auto density = features.channel(lidar::density_channel);
            const auto d_tx = features.channel(lidar::tx_distance_channel);
            const auto d_rx = features.channel(lidar::rx_distance_channel);
            for (std::size_t i = 0; i < density.size(); ++i)
            {
                const double t = static_cast<double>(truth.counts[i]);
                if (std::max(0.0, density[i]) == 0.0)
                {
                    empty_sq += t * t;
                    continue;
                }
                sparse[k].density.push_back(density[i]);
                sparse[k].distance.push_back(d_tx[i] + d_rx[i]);
                sparse[k].truth.push_back(t);
            }
        }

        BaselineParams best;
        double best_mse = std::numeric_limits<double>::infinity();
        for (double alpha : lattice.alphas)
            for (double beta : lattice.betas)
            {
                std::vector<std::vector<double>> raws(training.size());
                for (std::size_t k = 0; k < training.size(); ++k)
                {
                    const auto &sp = sparse[k];
                    raws[k].resize(sp.density.size());
                    for (std::size_t i = 0; i < sp.density.size(); ++i)
                        raws[k][i] = alpha * sp.density[i] * std::exp(-beta * sp.distance[i] / lattice.d_norm);
                }

                for (double thr : lattice.round_thresholds)
                {
                    double sq = empty_sq;
                    for (std::size_t k = 0; k < training.size(); ++k)
                        for (std::size_t i = 0; i < raws[k].size(); ++i)
                        {
                            const double e = static_cast<double>(round_value(raws[k][i], thr)) - sparse[k].truth[i];
                            sq += e * e;
                        }
                    const double mse = sq / static_cast<double>(voxels);
                    if (mse < best_mse)
                    {
                        best_mse = mse;
                        best = {alpha, beta, lattice.d_norm, thr};
                    }
                }
            }
        return best;
    }

    // ----- files ---------------------------------------------------------------

    namespace
    {
        VoxelGrid read_single_channel(const std::filesystem::path &path, const std::optional<Roi> &expected)
        {
            VoxelGrid grid = vxg::read(path);
            if (grid.channels() != 1)
                throw FormatError(path.string() + ": expected a single-channel grid, found " +
                                  std::to_string(grid.channels()) + " channels");
            if (expected && !(grid.roi() == *expected))
                throw FormatError(path.string() + ": grid shape/ROI does not match the manifest");
            return grid;
        }
    }

    RawPredictionGrid load_predictions(const std::filesystem::path &path, const std::optional<Roi> &expected)
    {
        VoxelGrid grid = read_single_channel(path, expected);
        const auto v = grid.channel(0);
        try
        {
            return RawPredictionGrid(grid.roi(), std::vector<double>(v.begin(), v.end()));
        }
        catch (const DomainError &e)
        {
            throw FormatError(path.string() + ": " + e.what());
        }
    }

    void store_predictions(const RawPredictionGrid &grid, const std::filesystem::path &path)
    {
        vxg::write(VoxelGrid(grid.roi, 1, grid.values), path);
    }

    ScattererGrid load_scatterers(const std::filesystem::path &path, const std::optional<Roi> &expected)
    {
        VoxelGrid grid = read_single_channel(path, expected);
        ScattererGrid out(grid.roi());
        const auto v = grid.channel(0);
        for (std::size_t i = 0; i < v.size(); ++i)
        {
            if (v[i] < 0.0 || v[i] != std::floor(v[i]))
                throw FormatError(path.string() + ": scatterer counts must be non-negative integers");
            out.counts[i] = static_cast<std::uint32_t>(v[i]);
        }
        return out;
    }

    void store_scatterers(const ScattererGrid &grid, const std::filesystem::path &path)
    {
        std::vector<double> v(grid.counts.begin(), grid.counts.end());
        vxg::write(VoxelGrid(grid.roi, 1, std::move(v)), path);
    }
}
