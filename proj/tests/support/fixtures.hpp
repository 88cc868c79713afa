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

// Shared scenario builders for tests.

#ifndef U2V_TESTS_FIXTURES_HPP
#define U2V_TESTS_FIXTURES_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "u2v/channel.hpp"
#include "u2v/clusters.hpp"
#include "u2v/core.hpp"

namespace fixtures
{
    // Piecewise-constant velocity sampled on t0 + i*dt; `velocity(t)` gives the velocity at sample time t.
    template <typename VelocityFn>
    u2v::Trajectory integrate(const u2v::Vec3 &p0, VelocityFn velocity, double t0, double dt, std::size_t n)
    {
        std::vector<u2v::TrajectorySample> s;
        u2v::Vec3 p = p0;
        for (std::size_t i = 0; i < n; ++i)
        {
            const double t = t0 + static_cast<double>(i) * dt;
            const u2v::Vec3 v = velocity(t);
            if (i > 0)
                p += (velocity(t - dt) + v) * (0.5 * dt);
            s.push_back({t, u2v::Pose(p, 0.0), v});
        }
        return u2v::Trajectory(std::move(s));
    }

    inline u2v::Trajectory constant_velocity(const u2v::Vec3 &p0, const u2v::Vec3 &v, double t0, double dt,
                                             std::size_t n)
    {
        return integrate(p0, [&](double) { return v; }, t0, dt, n);
    }

    inline u2v::Trajectory stationary(const u2v::Vec3 &p, double t0, double dt, std::size_t n)
    {
        return constant_velocity(p, {}, t0, dt, n);
    }

    inline u2v::clusters::Cluster cluster_at(const u2v::Vec3 &center, std::uint32_t count, std::int64_t track_id,
                                             u2v::clusters::ClusterKind kind = u2v::clusters::ClusterKind::stationary)
    {
        u2v::clusters::Cluster c;
        c.center = center;
        c.count = count;
        c.track_id = track_id;
        c.kind = kind;
        return c;
    }

    inline std::filesystem::path scratch_dir(const std::string &name)
    {
        auto dir = std::filesystem::temp_directory_path() / ("u2v_test_" + name);
        std::filesystem::remove_all(dir);
        std::filesystem::create_directories(dir);
        return dir;
    }
}

#endif
