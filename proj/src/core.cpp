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

#include "u2v/core.hpp"

#include <algorithm>
#include <string>

namespace u2v
{
    namespace
    {
        double time_tolerance(double t) { return 1e-12 * std::max(1.0, std::abs(t)); }
    }

    void require_finite(const Vec3 &v, const char *what)
    {
        if (!v.is_finite())
            throw DomainError(std::string(what) + ": non-finite coordinate");
    }

    double normalize_heading(double rad)
    {
        if (!std::isfinite(rad))
            throw DomainError("heading must be finite");
        double wrapped = std::fmod(rad + pi, 2.0 * pi);
        if (wrapped < 0.0)
            wrapped += 2.0 * pi;
        wrapped -= pi;
        return wrapped >= pi ? -pi : wrapped;
    }

    // ----- Trajectory ------------------------------------------------------

    Trajectory::Trajectory(std::vector<TrajectorySample> samples) : samples_(std::move(samples))
    {
        if (samples_.empty())
            throw UsageError("trajectory needs at least one sample");
        for (std::size_t i = 0; i < samples_.size(); ++i)
        {
            const auto &s = samples_[i];
            if (!std::isfinite(s.time))
                throw DomainError("trajectory: non-finite sample time");
            require_finite(s.pose.position, "trajectory position");
            require_finite(s.velocity, "trajectory velocity");
            if (i > 0 && !(s.time > samples_[i - 1].time))
                throw UsageError("trajectory: sample times must be strictly increasing (index " + std::to_string(i) + ")");
        }

        cumulative_.resize(samples_.size());
        for (std::size_t i = 1; i < samples_.size(); ++i)
        {
            const double h = samples_[i].time - samples_[i - 1].time;
            cumulative_[i] = cumulative_[i - 1] + (samples_[i - 1].velocity + samples_[i].velocity) * (0.5 * h);
        }
    }

    double Trajectory::start_time() const
    {
        if (samples_.empty())
            throw UsageError("empty trajectory");
        return samples_.front().time;
    }

    double Trajectory::end_time() const
    {
        if (samples_.empty())
            throw UsageError("empty trajectory");
        return samples_.back().time;
    }

    bool Trajectory::covers(double t) const
    {
        if (samples_.empty())
            return false;
        return t >= start_time() - time_tolerance(start_time()) && t <= end_time() + time_tolerance(end_time());
    }

    std::optional<double> Trajectory::uniform_interval(double rel_tol) const
    {
        if (samples_.size() < 2)
            return std::nullopt;
        const double h = samples_[1].time - samples_[0].time;
        for (std::size_t i = 2; i < samples_.size(); ++i)
            if (std::abs(samples_[i].time - samples_[i - 1].time - h) > rel_tol * h)
                return std::nullopt;
        return h;
    }

    std::size_t Trajectory::segment_of(double t) const
    {
        if (!covers(t))
            throw DomainError("time " + std::to_string(t) + " s outside trajectory support [" +
                              std::to_string(start_time()) + ", " + std::to_string(end_time()) + "]");
        auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                                   [](double value, const TrajectorySample &s) { return value < s.time; });
        if (it == samples_.begin())
            return 0;
        return static_cast<std::size_t>(std::distance(samples_.begin(), it)) - 1;
    }

    Vec3 Trajectory::position_at(double t) const
    {
        const std::size_t i = segment_of(t);
        if (i + 1 >= samples_.size())
            return samples_.back().pose.position;
        const auto &a = samples_[i];
        const auto &b = samples_[i + 1];
        const double w = std::clamp((t - a.time) / (b.time - a.time), 0.0, 1.0);
        if (w == 0.0)
            return a.pose.position;
        return a.pose.position + (b.pose.position - a.pose.position) * w;
    }

    Vec3 Trajectory::velocity_at(double t) const
    {
        return samples_[segment_of(t)].velocity;
    }

    double Trajectory::heading_at(double t) const
    {
        return samples_[segment_of(t)].pose.heading;
    }

    Vec3 Trajectory::integrated_velocity(double t) const
    {
        const std::size_t i = segment_of(t);
        if (i + 1 >= samples_.size())
            return cumulative_.back();
        const auto &a = samples_[i];
        const auto &b = samples_[i + 1];
        const double h = std::max(0.0, t - a.time);
        if (h == 0.0)
            return cumulative_[i];
        const Vec3 v_t = a.velocity + (b.velocity - a.velocity) * (h / (b.time - a.time));
        return cumulative_[i] + (a.velocity + v_t) * (0.5 * h);
    }

    // ----- Roi ---------------------------------------------------------------

    Roi::Roi(std::array<double, 3> lower, std::array<double, 3> upper, std::array<std::size_t, 3> dims)
        : lower_(lower), upper_(upper), dims_(dims)
    {
        static constexpr const char *axis = "xyz";
        for (int a = 0; a < 3; ++a)
        {
            if (!std::isfinite(lower_[a]) || !std::isfinite(upper_[a]))
                throw ConfigError(std::string("roi: non-finite bound on axis ") + axis[a]);
            if (!(upper_[a] > lower_[a]))
                throw ConfigError(std::string("roi: max must exceed min on axis ") + axis[a]);
            if (dims_[a] == 0)
                throw ConfigError(std::string("roi: grid dimension must be positive on axis ") + axis[a]);
            if (!((upper_[a] - lower_[a]) / static_cast<double>(dims_[a]) > 0.0))
                throw ConfigError(std::string("roi: zero voxel edge length on axis ") + axis[a]);
        }
    }

    std::array<double, 3> Roi::edge_lengths() const
    {
        return {(upper_[0] - lower_[0]) / static_cast<double>(dims_[0]),
                (upper_[1] - lower_[1]) / static_cast<double>(dims_[1]),
                (upper_[2] - lower_[2]) / static_cast<double>(dims_[2])};
    }

    double Roi::voxel_diagonal() const
    {
        const auto l = edge_lengths();
        return std::sqrt(l[0] * l[0] + l[1] * l[1] + l[2] * l[2]);
    }

    bool Roi::contains(const Vec3 &p) const
    {
        return p.x >= lower_[0] && p.x < upper_[0] &&
               p.y >= lower_[1] && p.y < upper_[1] &&
               p.z >= lower_[2] && p.z < upper_[2];
    }

    std::optional<VoxelIndex> Roi::index_of(const Vec3 &p) const
    {
        if (!contains(p))
            return std::nullopt;
        const auto l = edge_lengths();
        const double coord[3] = {p.x, p.y, p.z};
        VoxelIndex idx{};
        for (int a = 0; a < 3; ++a)
        {
            const auto i = static_cast<std::size_t>(std::floor((coord[a] - lower_[a]) / l[a]));
            // (max - eps - min) / L may round up to g
            idx[a] = std::min(i, dims_[a] - 1);
        }
        return idx;
    }

    Vec3 Roi::voxel_center(const VoxelIndex &idx) const
    {
        for (int a = 0; a < 3; ++a)
            if (idx[a] >= dims_[a])
                throw std::out_of_range("voxel index " + std::to_string(idx[a]) + " out of range on axis " +
                                        std::string(1, "xyz"[a]) + " (size " + std::to_string(dims_[a]) + ")");
        const auto l = edge_lengths();
        return {lower_[0] + (static_cast<double>(idx[0]) + 0.5) * l[0],
                lower_[1] + (static_cast<double>(idx[1]) + 0.5) * l[1],
                lower_[2] + (static_cast<double>(idx[2]) + 0.5) * l[2]};
    }

    VoxelIndex Roi::unflat(std::size_t flat_index) const
    {
        const std::size_t iz = flat_index % dims_[2];
        const std::size_t rest = flat_index / dims_[2];
        return {rest / dims_[1], rest % dims_[1], iz};
    }

    // ----- VoxelGrid ---------------------------------------------------------

    VoxelGrid::VoxelGrid(const Roi &roi, std::size_t channels, double fill)
        : roi_(roi), channels_(channels), values_(channels * roi.voxel_count(), fill)
    {
        if (channels == 0)
            throw UsageError("voxel grid needs at least one channel");
    }

    VoxelGrid::VoxelGrid(const Roi &roi, std::size_t channels, std::vector<double> values)
        : roi_(roi), channels_(channels), values_(std::move(values))
    {
        if (channels == 0)
            throw UsageError("voxel grid needs at least one channel");
        if (values_.size() != channels * roi.voxel_count())
            throw UsageError("voxel grid: value count does not match shape");
        for (double v : values_)
            if (!std::isfinite(v))
                throw DomainError("voxel grid: non-finite value");
    }

    std::span<double> VoxelGrid::channel(std::size_t c)
    {
        if (c >= channels_)
            throw std::out_of_range("channel index out of range");
        return std::span<double>(values_).subspan(c * roi_.voxel_count(), roi_.voxel_count());
    }

    std::span<const double> VoxelGrid::channel(std::size_t c) const
    {
        if (c >= channels_)
            throw std::out_of_range("channel index out of range");
        return std::span<const double>(values_).subspan(c * roi_.voxel_count(), roi_.voxel_count());
    }

    // ----- RF ------------------------------------------------------------------

    double wavelength(double carrier_hz)
    {
        if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz))
            throw DomainError("carrier frequency must be positive and finite");
        return speed_of_light / carrier_hz;
    }

    void RfConfig::validate() const
    {
        if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz))
            throw ConfigError("rf.carrier_hz must be positive");
        if (!(bandwidth_hz >= 0.0) || !std::isfinite(bandwidth_hz))
            throw ConfigError("rf.bandwidth_hz must be non-negative");
        if (!std::isfinite(chi))
            throw ConfigError("rf.chi must be finite");
        if (ricean && (!(*ricean >= 0.0) || std::isnan(*ricean)))
            throw ConfigError("rf.ricean must be >= 0 or 'auto'");
        if (!(eta_gr >= 0.0 && eta_gr <= 1.0))
            throw ConfigError("rf.eta_gr must lie in [0, 1]");
        if (!(window_end >= window_start))
            throw ConfigError("rf window: t_end must not precede t0");
    }
}
