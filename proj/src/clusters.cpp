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

#include "u2v/clusters.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "u2v/csv.hpp"

namespace u2v::clusters
{
    const char *to_string(ClusterKind kind)
    {
        return kind == ClusterKind::dynamic ? "dynamic" : "static";
    }

    std::uint64_t ClusterSet::total_scatterers() const
    {
        return std::accumulate(clusters.begin(), clusters.end(), std::uint64_t{0},
                               [](std::uint64_t s, const Cluster &c) { return s + c.count; });
    }

    const TrackState *ClusterTrack::state_at(double t) const
    {
        const double tol = 1e-9 * std::max(1.0, std::abs(t));
        auto it = std::lower_bound(states.begin(), states.end(), t - tol,
                                   [](const TrackState &s, double value) { return s.time < value; });
        if (it != states.end() && std::abs(it->time - t) <= tol)
            return &*it;
        return nullptr;
    }

    ClusterSet extract_clusters(const scatter::ScattererGrid &grid, double time)
    {
        ClusterSet set{time, grid.roi, {}};
        for (std::size_t i = 0; i < grid.counts.size(); ++i)
        {
            if (grid.counts[i] == 0)
                continue;
            Cluster c;
            c.voxel = grid.roi.unflat(i);
            c.center = grid.roi.voxel_center(c.voxel);
            c.count = grid.counts[i];
            set.clusters.push_back(c);
        }
        return set;
    }

    ClusterSet classify(ClusterSet set, double height_threshold)
    {
        if (!std::isfinite(height_threshold))
            throw ConfigError("cluster height threshold must be finite");
        for (auto &c : set.clusters)
        {
            c.kind = c.center.z < height_threshold ? ClusterKind::dynamic : ClusterKind::stationary;
            if (c.kind == ClusterKind::stationary)
                c.velocity = {};
        }
        return set;
    }

    VelocityEstimate estimate_velocity(const ClusterTrack &track, double t, double dt)
    {
        if (!(dt > 0.0))
            throw DomainError("estimate_velocity: dt must be positive");
        if (track.kind == ClusterKind::stationary)
            return {};
        const TrackState *now = track.state_at(t);
        if (!now)
            throw DomainError("estimate_velocity: track has no state at the requested time");
        const TrackState *prev = track.state_at(t - dt);
        if (!prev)
            return {{}, true};
        return {(now->cluster.center - prev->cluster.center) / dt, false};
    }

    std::vector<ClusterTrack> track(std::span<const ClusterSet> sets, double r_match)
    {
        if (!(r_match >= 0.0))
            throw ConfigError("match radius must be non-negative");
        if (sets.size() >= 2)
        {
            const double dt = sets[1].time - sets[0].time;
            for (std::size_t k = 1; k < sets.size(); ++k)
            {
                const double h = sets[k].time - sets[k - 1].time;
                if (!(h > 0.0) || std::abs(h - dt) > 1e-6 * dt)
                    throw UsageError("track: snapshots must be uniformly spaced in time");
            }
        }

        std::vector<ClusterTrack> tracks;
        std::map<std::size_t, std::size_t> alive; // flat voxel index -> track position, previous snapshot

        for (std::size_t k = 0; k < sets.size(); ++k)
        {
            const ClusterSet &set = sets[k];
            std::map<std::size_t, std::size_t> next_alive;
            std::vector<bool> assigned(set.clusters.size(), false);
            std::vector<bool> continued(tracks.size(), false);

            auto extend = [&](std::size_t track_pos, std::size_t ci)
            {
                tracks[track_pos].states.push_back({k, set.time, set.clusters[ci]});
                next_alive[set.roi.flat(set.clusters[ci].voxel)] = track_pos;
                continued[track_pos] = true;
                assigned[ci] = true;
            };

            // continuation: the voxel stays occupied
            for (std::size_t ci = 0; ci < set.clusters.size(); ++ci)
            {
                auto it = alive.find(set.roi.flat(set.clusters[ci].voxel));
                if (it != alive.end())
                    extend(it->second, ci);
            }

            // re-matching of moving occupancy
            std::vector<std::tuple<double, std::int64_t, std::size_t, std::size_t>> candidates;
            for (const auto &[flat, tp] : alive)
            {
                if (continued[tp] || tracks[tp].kind != ClusterKind::dynamic)
                    continue;
                const Vec3 &last = tracks[tp].states.back().cluster.center;
                for (std::size_t ci = 0; ci < set.clusters.size(); ++ci)
                {
                    if (assigned[ci] || set.clusters[ci].kind != ClusterKind::dynamic)
                        continue;
                    const double d = distance(last, set.clusters[ci].center);
                    if (d <= r_match)
                        candidates.emplace_back(d, tracks[tp].id, ci, tp);
                }
            }
            std::sort(candidates.begin(), candidates.end());
            for (const auto &[d, id, ci, tp] : candidates)
                if (!assigned[ci] && !continued[tp])
                    extend(tp, ci);

            // births
            for (std::size_t ci = 0; ci < set.clusters.size(); ++ci)
            {
                if (assigned[ci])
                    continue;
                ClusterTrack t;
                t.id = static_cast<std::int64_t>(tracks.size());
                t.kind = set.clusters[ci].kind;
                tracks.push_back(std::move(t));
                continued.push_back(false);
                extend(tracks.size() - 1, ci);
            }
            alive = std::move(next_alive);
        }
        return tracks;
    }

    std::vector<ClusterSet> apply_tracks(std::span<const ClusterSet> sets, std::span<const ClusterTrack> tracks,
                                         double dt)
    {
        if (!(dt > 0.0))
            throw DomainError("apply_tracks: dt must be positive");
        std::vector<ClusterSet> out(sets.begin(), sets.end());
        // (snapshot, flat voxel) -> (track, state)
        std::map<std::pair<std::size_t, std::size_t>, std::pair<const ClusterTrack *, std::size_t>> lookup;
        for (const auto &t : tracks)
            for (std::size_t s = 0; s < t.states.size(); ++s)
            {
                const auto &st = t.states[s];
                if (st.snapshot >= sets.size())
                    throw UsageError("apply_tracks: track refers to a snapshot outside the sequence");
                lookup[{st.snapshot, sets[st.snapshot].roi.flat(st.cluster.voxel)}] = {&t, s};
            }

        for (std::size_t k = 0; k < out.size(); ++k)
            for (auto &c : out[k].clusters)
            {
                auto it = lookup.find({k, out[k].roi.flat(c.voxel)});
                if (it == lookup.end())
                    throw UsageError("apply_tracks: cluster without track");
                const ClusterTrack &t = *it->second.first;
                c.track_id = t.id;
                if (c.kind == ClusterKind::stationary)
                {
                    c.velocity = {};
                    c.newborn = false;
                    continue;
                }
                const std::size_t s = it->second.second;
                c.newborn = s == 0;
                c.velocity = c.newborn ? Vec3{} : (t.states[s].cluster.center - t.states[s - 1].cluster.center) / dt;
            }
        return out;
    }

    void write_csv(std::ostream &os, std::span<const ClusterSet> sets)
    {
        os << "time,ix,iy,iz,cx,cy,cz,count,kind,vx,vy,vz\n";
        for (const auto &set : sets)
            for (const auto &c : set.clusters)
            {
                os << csv::num(set.time) << ',' << c.voxel[0] << ',' << c.voxel[1] << ',' << c.voxel[2] << ','
                   << csv::num(c.center.x) << ',' << csv::num(c.center.y) << ',' << csv::num(c.center.z) << ','
                   << c.count << ',' << to_string(c.kind) << ',' << csv::num(c.velocity.x) << ','
                   << csv::num(c.velocity.y) << ',' << csv::num(c.velocity.z) << '\n';
            }
    }
}
