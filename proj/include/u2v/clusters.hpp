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

#ifndef U2V_CLUSTERS_HPP
#define U2V_CLUSTERS_HPP

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "u2v/core.hpp"
#include "u2v/scatterer.hpp"

namespace u2v::clusters
{
    enum class ClusterKind
    {
        dynamic,
        stationary
    };

    const char *to_string(ClusterKind kind);

    // All scatterers of one voxel, represented at the voxel center
    struct Cluster
    {
        VoxelIndex voxel{};
        Vec3 center;
        std::uint32_t count = 0;
        ClusterKind kind = ClusterKind::stationary;
        Vec3 velocity;              // zero for stationary clusters
        std::int64_t track_id = -1; // -1 until tracked
        bool newborn = false;       // dynamic cluster without a predecessor
    };

    struct ClusterSet
    {
        double time = 0.0;
        Roi roi;
        std::vector<Cluster> clusters; // sorted by flat voxel index, unique voxels

        std::size_t size() const { return clusters.size(); }
        std::uint64_t total_scatterers() const;
    };

    struct TrackState
    {
        std::size_t snapshot = 0;
        double time = 0.0;
        Cluster cluster;
    };

    struct ClusterTrack
    {
        std::int64_t id = 0;
        ClusterKind kind = ClusterKind::stationary;
        std::vector<TrackState> states; // one per snapshot, contiguous

        double birth_time() const { return states.front().time; }
        double death_time() const { return states.back().time; }
        const TrackState *state_at(double t) const;
    };

    // One cluster per occupied voxel, centered at the voxel center
    ClusterSet extract_clusters(const scatter::ScattererGrid &grid, double time);

    // dynamic iff center.z < H_c; ties and above are stationary (velocity reset to zero)
    ClusterSet classify(ClusterSet set, double height_threshold);

    struct VelocityEstimate
    {
        Vec3 velocity;
        bool newborn = false;
    };

    // Difference quotient of the matched cluster center between t - dt and t.
    // Stationary tracks always yield zero; a dynamic track without a state at t - dt is newborn.
    VelocityEstimate estimate_velocity(const ClusterTrack &track, double t, double dt);

    // Links clusters over time: same voxel continues a track; otherwise unmatched dynamic
    // clusters are greedily matched (nearest first) to ended dynamic tracks within r_match.
    std::vector<ClusterTrack> track(std::span<const ClusterSet> sets, double r_match);

    // Copies track ids, velocities and newborn flags back into the per-snapshot sets
    std::vector<ClusterSet> apply_tracks(std::span<const ClusterSet> sets, std::span<const ClusterTrack> tracks,
                                         double dt);

    // CSV: time,ix,iy,iz,cx,cy,cz,count,kind,vx,vy,vz
    void write_csv(std::ostream &os, std::span<const ClusterSet> sets);
}

#endif
