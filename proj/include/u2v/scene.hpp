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

#ifndef U2V_SCENE_HPP
#define U2V_SCENE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "u2v/core.hpp"
#include "u2v/lidar.hpp"
#include "u2v/scatterer.hpp"

namespace u2v::scene
{
    // Axis-aligned box
    struct Box
    {
        Vec3 lower;
        Vec3 upper;

        Box shifted(const Vec3 &d) const { return {lower + d, upper + d}; }
    };

    // Entry distance of the ray o + s*d (s >= 0) into the box, if any.
    std::optional<double> ray_box(const Vec3 &origin, const Vec3 &dir, const Box &box);

    // True when the open segment (a, b) passes through the box.
    bool segment_hits(const Vec3 &a, const Vec3 &b, const Box &box);

    enum class ObjectKind
    {
        building,
        vehicle
    };

    struct SceneObject
    {
        std::size_t id = 0;
        ObjectKind kind = ObjectKind::building;
        Box box;      // at the first snapshot
        Vec3 velocity; // constant; zero for buildings

        Box at(double elapsed) const { return box.shifted(velocity * elapsed); }
    };

    struct SyntheticSceneSpec
    {
        std::size_t vehicles = 10; // VTD level
        Vec3 vehicle_size{4.5, 1.8, 1.5}; // length, width, height [m]
        double min_speed = 5.0;  // [m/s]
        double max_speed = 15.0; // [m/s]
        std::size_t buildings = 4;
        double uav_height = 60.0; // [m]
        Vec3 uav_velocity{2.0, 0.0, 0.0};

        std::size_t snapshots = 20;
        double dt = 0.01;
        double start_time = 0.0;

        std::size_t rings = 16;
        std::size_t azimuth_rays = 360;
        double tx_elevation_min_deg = -85.0, tx_elevation_max_deg = -15.0;
        double rx_elevation_min_deg = -15.0, rx_elevation_max_deg = 15.0;
        double max_range = 150.0; // [m]

        double scatterer_spacing = 1.0; // face lattice pitch [m]
        double height_threshold = 0.2;  // H_t written into the manifest
        Roi roi{{-100.0, -100.0, 0.0}, {100.0, 100.0, 40.0}, {40, 40, 20}};
        std::uint64_t seed = 0;

        void validate() const; // ConfigError
    };

    struct SceneLayout
    {
        std::vector<SceneObject> objects;
        Trajectory tx;
        Trajectory rx;
        std::optional<std::size_t> host; // object carrying the receiver
    };

    SceneLayout layout_scene(const SyntheticSceneSpec &spec);

    // First-hit LiDAR returns in the world frame (host object excluded).
    lidar::PointCloud scan(const SceneLayout &layout, const Pose &sensor, double elapsed, double elevation_min_deg,
                           double elevation_max_deg, const SyntheticSceneSpec &spec);

    // Face-lattice points of every non-host object that see both Tx and Rx, binned into the ROI.
    scatter::ScattererGrid truth_scatterers(const SceneLayout &layout, double elapsed, const Vec3 &tx_pos,
                                            const Vec3 &rx_pos, const SyntheticSceneSpec &spec);

    struct SceneSummary
    {
        std::size_t moving_objects = 0;
        std::size_t static_objects = 0;
        std::filesystem::path manifest;
    };

    // Writes trajectories/, clouds/, truth/, objects.csv and manifest.ini under out_dir.
    SceneSummary synth_scene(const SyntheticSceneSpec &spec, const std::filesystem::path &out_dir);
}

#endif
