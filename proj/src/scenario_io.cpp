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

#include "u2v/scenario_io.hpp"

#include <algorithm>
#include <fstream>

#include "u2v/csv.hpp"
#include "u2v/rng.hpp"

namespace u2v::io
{
    Trajectory read_trajectory(const std::filesystem::path &path)
    {
        const auto table = csv::read_table(path, {"t", "x", "y", "z", "heading_rad", "vx", "vy", "vz"});
        std::vector<TrajectorySample> samples;
        samples.reserve(table.rows.size());
        for (const auto &r : table.rows)
            samples.push_back({r[0], Pose({r[1], r[2], r[3]}, r[4]), {r[5], r[6], r[7]}});
        try
        {
            return Trajectory(std::move(samples));
        }
        catch (const Error &e)
        {
            throw FormatError(path.string() + ": " + e.what());
        }
    }

    void write_trajectory(std::ostream &os, const Trajectory &trajectory)
    {
        os << "t,x,y,z,heading_rad,vx,vy,vz\n";
        for (const auto &s : trajectory.samples())
            os << csv::num(s.time) << ',' << csv::num(s.pose.position.x) << ',' << csv::num(s.pose.position.y) << ','
               << csv::num(s.pose.position.z) << ',' << csv::num(s.pose.heading) << ',' << csv::num(s.velocity.x) << ','
               << csv::num(s.velocity.y) << ',' << csv::num(s.velocity.z) << '\n';
    }

    lidar::PointCloud read_cloud(const std::filesystem::path &path, lidar::Frame frame)
    {
        const auto table = csv::read_table(path, {"x", "y", "z"});
        lidar::PointCloud cloud{frame, {}};
        cloud.points.reserve(table.rows.size());
        for (const auto &r : table.rows)
            cloud.points.push_back({r[0], r[1], r[2]});
        return cloud;
    }

    void write_cloud(std::ostream &os, const lidar::PointCloud &cloud)
    {
        os << "x,y,z\n";
        for (const auto &p : cloud.points)
            os << csv::num(p.x) << ',' << csv::num(p.y) << ',' << csv::num(p.z) << '\n';
    }

    void write_text(const std::filesystem::path &path, const std::string &contents)
    {
        std::error_code ec;
        if (path.has_parent_path())
            std::filesystem::create_directories(path.parent_path(), ec);
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os)
            throw IoError("cannot open " + path.string() + " for writing");
        os << contents;
        if (!os)
            throw IoError("write failed: " + path.string());
    }

    DatasetSplit split_dataset(std::size_t n, std::uint64_t seed)
    {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i)
            order[i] = i;
        std::sort(order.begin(), order.end(), [seed](std::size_t a, std::size_t b)
                  {
            const auto ha = substream_seed(seed, a), hb = substream_seed(seed, b);
            return ha != hb ? ha < hb : a < b; });

        const std::size_t n_train = n * 3 / 5;
        const std::size_t n_val = n / 5;
        DatasetSplit s;
        s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
        s.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                            order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
        s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
        for (auto *v : {&s.train, &s.validation, &s.test})
            std::sort(v->begin(), v->end());
        return s;
    }
}
