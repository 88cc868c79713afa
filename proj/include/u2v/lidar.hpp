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

#ifndef U2V_LIDAR_HPP
#define U2V_LIDAR_HPP

#include <vector>

#include "u2v/core.hpp"

namespace u2v::lidar
{
    enum class Frame
    {
        sensor_local,
        world
    };

    struct PointCloud
    {
        Frame frame = Frame::world;
        std::vector<Vec3> points;

        std::size_t size() const { return points.size(); }
        bool empty() const { return points.empty(); }
    };

    // Sensor-to-world mapping.
    //   paper:        x = xs - xl cos(th) + yl sin(th),  y = ys - yl cos(th) + xl sin(th),  z = zs - zl
    //   conventional: x = xs + xl cos(th) - yl sin(th),  y = ys + xl sin(th) + yl cos(th),  z = zs + zl
    // The "paper" form is not a rotation (its 2x2 block has determinant cos(2 th)), so scenes that
    // must be inverted (synthetic LiDAR) use the conventional form.
    enum class TransformConvention
    {
        paper,
        conventional
    };

    struct FilterConfig
    {
        Roi roi;
        double height_threshold = 0.0; // H_t [m]; points with z < H_t are dropped
    };

    PointCloud to_world(const PointCloud &cloud, const Pose &sensor_pose,
                        TransformConvention convention = TransformConvention::paper);

    // Inverse of the conventional transform: world points into the sensor frame
    PointCloud to_sensor_local(const PointCloud &cloud, const Pose &sensor_pose);

    // Multiset union of two world-frame clouds (duplicates kept)
    PointCloud register_clouds(const PointCloud &tx_cloud, const PointCloud &rx_cloud);

    // Keeps points inside the half-open ROI with z >= H_t
    PointCloud filter_valid(const PointCloud &cloud, const FilterConfig &cfg);

    // One-channel grid of per-voxel point counts; every point must lie inside the ROI
    VoxelGrid voxelize_counts(const PointCloud &cloud, const Roi &roi);

    // Two channels: distance from each voxel center to Tx (0) and to Rx (1)
    VoxelGrid distance_features(const Roi &roi, const Vec3 &tx_pos, const Vec3 &rx_pos);

    struct Snapshot
    {
        PointCloud tx_cloud;
        PointCloud rx_cloud;
        Pose tx_pose;
        Pose rx_pose;
    };

    inline constexpr std::size_t density_channel = 0;
    inline constexpr std::size_t tx_distance_channel = 1;
    inline constexpr std::size_t rx_distance_channel = 2;

    // Three-channel environment feature grid [density, D_Tx, D_Rx]; world-frame clouds skip the transform
    VoxelGrid build_feature_grid(const Snapshot &snapshot, const FilterConfig &cfg,
                                 TransformConvention convention = TransformConvention::paper);
}

#endif
