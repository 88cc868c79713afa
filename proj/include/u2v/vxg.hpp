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

#ifndef U2V_VXG_HPP
#define U2V_VXG_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "u2v/core.hpp"

// VXG binary grid format, little-endian throughout:
//   "VXG1" | u32 C, gx, gy, gz | f64 x_min, x_max, y_min, y_max, z_min, z_max |
//   C*gx*gy*gz f32 values in index order ((c*gx + ix)*gy + iy)*gz + iz
namespace u2v::vxg
{
    inline constexpr char magic[4] = {'V', 'X', 'G', '1'};
    inline constexpr std::size_t header_size = 4 + 4 * 4 + 6 * 8;

    std::vector<std::uint8_t> encode(const VoxelGrid &grid);
    VoxelGrid decode(std::span<const std::uint8_t> bytes);

    // Throws IoError when the file cannot be opened/written, FormatError on bad contents
    void write(const VoxelGrid &grid, const std::filesystem::path &path);
    VoxelGrid read(const std::filesystem::path &path);
}

#endif
