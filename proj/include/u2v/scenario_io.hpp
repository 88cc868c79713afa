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

#ifndef U2V_SCENARIO_IO_HPP
#define U2V_SCENARIO_IO_HPP

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <vector>

#include "u2v/core.hpp"
#include "u2v/lidar.hpp"

namespace u2v::io
{
    // CSV t,x,y,z,heading_rad,vx,vy,vz
    Trajectory read_trajectory(const std::filesystem::path &path);
    void write_trajectory(std::ostream &os, const Trajectory &trajectory);

    // CSV x,y,z; the frame is declared by the caller
    lidar::PointCloud read_cloud(const std::filesystem::path &path, lidar::Frame frame);
    void write_cloud(std::ostream &os, const lidar::PointCloud &cloud);

    // Writes a text file, creating parent directories; throws IoError on failure
    void write_text(const std::filesystem::path &path, const std::string &contents);

    struct DatasetSplit
    {
        std::vector<std::size_t> train, validation, test;
    };

    // 3:1:1 partition of [0, n) ordered by a hash of (seed, index); exact on multiples of 5
    DatasetSplit split_dataset(std::size_t n, std::uint64_t seed);
}

#endif
