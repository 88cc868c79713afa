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

#ifndef U2V_CORE_HPP
#define U2V_CORE_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "u2v/errors.hpp"

namespace u2v
{
    inline constexpr double speed_of_light = 299792458.0; // [m/s]
    inline constexpr double pi = 3.14159265358979323846;

    // ----- Vec3 ------------------------------------------------------------

    struct Vec3
    {
        double x = 0.0;
        double y = 0.0;
        double z = 0.0;

        constexpr Vec3 &operator+=(const Vec3 &o) { x += o.x, y += o.y, z += o.z; return *this; }
        constexpr Vec3 &operator-=(const Vec3 &o) { x -= o.x, y -= o.y, z -= o.z; return *this; }
        constexpr Vec3 &operator*=(double s) { x *= s, y *= s, z *= s; return *this; }
        friend constexpr Vec3 operator+(Vec3 a, const Vec3 &b) { return a += b; }
        friend constexpr Vec3 operator-(Vec3 a, const Vec3 &b) { return a -= b; }
        friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
        friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
        friend constexpr Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }
        friend constexpr Vec3 operator-(const Vec3 &a) { return {-a.x, -a.y, -a.z}; }
        friend constexpr bool operator==(const Vec3 &, const Vec3 &) = default;

        bool is_finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
    };

    constexpr double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
    inline double norm(const Vec3 &a) { return std::sqrt(dot(a, a)); }
    inline double distance(const Vec3 &a, const Vec3 &b) { return norm(a - b); }

    // Throws DomainError if any component is NaN or infinite
    void require_finite(const Vec3 &v, const char *what);

    // ----- Pose / Trajectory -------------------------------------------------

    // Wraps an angle to [-pi, pi)
    double normalize_heading(double rad);

    struct Pose
    {
        Vec3 position;
        double heading = 0.0; // [rad] w.r.t. the x-axis, in [-pi, pi)

        Pose() = default;
        Pose(const Vec3 &pos, double heading_rad) : position(pos), heading(normalize_heading(heading_rad)) {}
    };

    struct TrajectorySample
    {
        double time = 0.0; // [s]
        Pose pose;
        Vec3 velocity; // [m/s]
    };

    // Time-ordered platform states. Positions are interpolated linearly between
    // samples, velocities are held (zero-order) from the last sample at or before t.
    class Trajectory
    {
    public:
        Trajectory() = default;
        explicit Trajectory(std::vector<TrajectorySample> samples);

        std::span<const TrajectorySample> samples() const { return samples_; }
        std::size_t size() const { return samples_.size(); }
        bool empty() const { return samples_.empty(); }
        double start_time() const;
        double end_time() const;
        bool covers(double t) const;

        // Sample spacing if uniform within rel_tol, otherwise nullopt
        std::optional<double> uniform_interval(double rel_tol = 1e-9) const;

        Vec3 position_at(double t) const;
        Vec3 velocity_at(double t) const;
        double heading_at(double t) const;
        Pose pose_at(double t) const { return {position_at(t), heading_at(t)}; }

        // Trapezoidal integral of the sampled velocity from start_time() to t.
        // Velocity is taken as piecewise linear between samples for this purpose.
        Vec3 integrated_velocity(double t) const;

    private:
        std::size_t segment_of(double t) const; // index i with t_i <= t < t_{i+1} (clamped)

        std::vector<TrajectorySample> samples_;
        std::vector<Vec3> cumulative_; // integral at each sample time
    };

    // ----- Region of interest / voxel grids ---------------------------------

    using VoxelIndex = std::array<std::size_t, 3>;

    // Axis-aligned region partitioned into gx * gy * gz voxels. Intervals are half-open [min, max).
    class Roi
    {
    public:
        Roi() = default;
        Roi(std::array<double, 3> lower, std::array<double, 3> upper, std::array<std::size_t, 3> dims);

        const std::array<double, 3> &lower() const { return lower_; }
        const std::array<double, 3> &upper() const { return upper_; }
        const std::array<std::size_t, 3> &dims() const { return dims_; }
        std::array<double, 3> edge_lengths() const; // voxel resolution per axis [m]
        std::size_t voxel_count() const { return dims_[0] * dims_[1] * dims_[2]; }
        double voxel_diagonal() const;

        bool contains(const Vec3 &p) const;

        // Voxel containing p, or nullopt if p lies outside the ROI
        std::optional<VoxelIndex> index_of(const Vec3 &p) const;

        // Geometric center of a voxel; throws std::out_of_range for invalid indices
        Vec3 voxel_center(const VoxelIndex &idx) const;

        std::size_t flat(const VoxelIndex &idx) const { return (idx[0] * dims_[1] + idx[1]) * dims_[2] + idx[2]; }
        VoxelIndex unflat(std::size_t flat_index) const;

        friend bool operator==(const Roi &, const Roi &) = default;

    private:
        std::array<double, 3> lower_{0.0, 0.0, 0.0};
        std::array<double, 3> upper_{1.0, 1.0, 1.0};
        std::array<std::size_t, 3> dims_{1, 1, 1};
    };

    inline Vec3 voxel_center(const Roi &roi, const VoxelIndex &idx) { return roi.voxel_center(idx); }

    // Dense multi-channel grid, values stored at ((c * gx + ix) * gy + iy) * gz + iz
    class VoxelGrid
    {
    public:
        VoxelGrid() = default;
        VoxelGrid(const Roi &roi, std::size_t channels, double fill = 0.0);
        VoxelGrid(const Roi &roi, std::size_t channels, std::vector<double> values);

        const Roi &roi() const { return roi_; }
        std::size_t channels() const { return channels_; }
        std::size_t voxels_per_channel() const { return roi_.voxel_count(); }

        double &at(std::size_t c, const VoxelIndex &idx) { return values_[offset(c, idx)]; }
        double at(std::size_t c, const VoxelIndex &idx) const { return values_[offset(c, idx)]; }

        std::span<double> channel(std::size_t c);
        std::span<const double> channel(std::size_t c) const;
        std::span<const double> values() const { return values_; }
        std::span<double> values() { return values_; }

        friend bool operator==(const VoxelGrid &, const VoxelGrid &) = default;

    private:
        std::size_t offset(std::size_t c, const VoxelIndex &idx) const
        {
            return c * roi_.voxel_count() + roi_.flat(idx);
        }

        Roi roi_;
        std::size_t channels_ = 0;
        std::vector<double> values_;
    };

    // ----- RF configuration --------------------------------------------------

    // Carrier wavelength c / f_c; throws DomainError for f_c <= 0
    double wavelength(double carrier_hz);

    struct RfConfig
    {
        double carrier_hz = 28e9;
        double bandwidth_hz = 2e9;
        double chi = 0.0;                // frequency-dependence exponent of NLoS/GR gains
        std::optional<double> ricean;    // Ricean factor; nullopt selects the power-budget ("auto") mode
        double eta_gr = 0.3;             // ground-reflection power share; NLoS share is 1 - eta_gr
        double window_start = 0.0;       // t_0 [s]
        double window_end = 1e300;       // T_0 [s]

        double wavelength() const { return u2v::wavelength(carrier_hz); }
        double eta_nlos() const { return 1.0 - eta_gr; }

        // Throws ConfigError for out-of-range members
        void validate() const;
    };
}

#endif
