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

#include "u2v/lidar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace u2v::lidar
{
    PointCloud to_world(const PointCloud &cloud, const Pose &sensor_pose, TransformConvention convention)
    {
        if (cloud.frame != Frame::sensor_local)
            throw UsageError("to_world: input cloud is not in the sensor frame");
        require_finite(sensor_pose.position, "sensor pose");

        const double c = std::cos(sensor_pose.heading);
        const double s = std::sin(sensor_pose.heading);
        const Vec3 &o = sensor_pose.position;

        PointCloud out{Frame::world, {}};
        out.points.reserve(cloud.points.size());
        for (const auto &p : cloud.points)
        {
            require_finite(p, "lidar point");
            if (convention == TransformConvention::paper)
                out.points.push_back({o.x - p.x * c + p.y * s, o.y - p.y * c + p.x * s, o.z - p.z});
            else
                out.points.push_back({o.x + p.x * c - p.y * s, o.y + p.x * s + p.y * c, o.z + p.z});
        }
        return out;
    }

    PointCloud to_sensor_local(const PointCloud &cloud, const Pose &sensor_pose)
    {
        if (cloud.frame != Frame::world)
            throw UsageError("to_sensor_local: input cloud is not in the world frame");
        const double c = std::cos(sensor_pose.heading);
        const double s = std::sin(sensor_pose.heading);
        PointCloud out{Frame::sensor_local, {}};
        out.points.reserve(cloud.points.size());
        for (const auto &p : cloud.points)
        {
            const Vec3 d = p - sensor_pose.position;
            out.points.push_back({d.x * c + d.y * s, -d.x * s + d.y * c, d.z});
        }
        return out;
    }

    PointCloud register_clouds(const PointCloud &tx_cloud, const PointCloud &rx_cloud)
    {
        if (tx_cloud.frame != Frame::world || rx_cloud.frame != Frame::world)
            throw UsageError("register_clouds: both clouds must be in the world frame");
        PointCloud out{Frame::world, {}};
        out.points.reserve(tx_cloud.size() + rx_cloud.size());
        out.points.insert(out.points.end(), tx_cloud.points.begin(), tx_cloud.points.end());
        out.points.insert(out.points.end(), rx_cloud.points.begin(), rx_cloud.points.end());
        return out;
    }

    PointCloud filter_valid(const PointCloud &cloud, const FilterConfig &cfg)
    {
        if (cloud.frame != Frame::world)
            throw UsageError("filter_valid: cloud must be in the world frame");
        if (!std::isfinite(cfg.height_threshold))
            throw ConfigError("height threshold must be finite");
        PointCloud out{Frame::world, {}};
        std::copy_if(cloud.points.begin(), cloud.points.end(), std::back_inserter(out.points),
                     [&](const Vec3 &p)
                     { return p.z >= cfg.height_threshold && cfg.roi.contains(p); });
        return out;
    }

    VoxelGrid voxelize_counts(const PointCloud &cloud, const Roi &roi)
    {
        VoxelGrid grid(roi, 1, 0.0);
        for (const auto &p : cloud.points)
        {
            const auto idx = roi.index_of(p);
            if (!idx)
                throw std::logic_error("voxelize_counts: point outside ROI (filter_valid not applied)");
            grid.at(0, *idx) += 1.0;
        }
        return grid;
    }

    VoxelGrid distance_features(const Roi &roi, const Vec3 &tx_pos, const Vec3 &rx_pos)
    {
        require_finite(tx_pos, "tx position");
        require_finite(rx_pos, "rx position");
        VoxelGrid grid(roi, 2, 0.0);
        const auto &g = roi.dims();
        for (std::size_t ix = 0; ix < g[0]; ++ix)
            for (std::size_t iy = 0; iy < g[1]; ++iy)
                for (std::size_t iz = 0; iz < g[2]; ++iz)
                {
                    const VoxelIndex idx{ix, iy, iz};
                    const Vec3 center = roi.voxel_center(idx);
                    grid.at(0, idx) = distance(center, tx_pos);
                    grid.at(1, idx) = distance(center, rx_pos);
                }
        return grid;
    }

    VoxelGrid build_feature_grid(const Snapshot &snapshot, const FilterConfig &cfg, TransformConvention convention)
    {
        auto world = [&](const PointCloud &c, const Pose &pose)
        { return c.frame == Frame::world ? c : to_world(c, pose, convention); };
        const PointCloud tx_world = world(snapshot.tx_cloud, snapshot.tx_pose);
        const PointCloud rx_world = world(snapshot.rx_cloud, snapshot.rx_pose);
        const PointCloud valid = filter_valid(register_clouds(tx_world, rx_world), cfg);

        const VoxelGrid density = voxelize_counts(valid, cfg.roi);
        const VoxelGrid dist = distance_features(cfg.roi, snapshot.tx_pose.position, snapshot.rx_pose.position);

        VoxelGrid features(cfg.roi, 3, 0.0);
        std::ranges::copy(density.channel(0), features.channel(density_channel).begin());
        std::ranges::copy(dist.channel(0), features.channel(tx_distance_channel).begin());
        std::ranges::copy(dist.channel(1), features.channel(rx_distance_channel).begin());
        return features;
    }
}
