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

#include "u2v/vxg.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace u2v::vxg
{
    namespace
    {
        template <typename T>
        void put_le(std::vector<std::uint8_t> &out, T value)
        {
            using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
            const U bits = std::bit_cast<U>(value);
            for (std::size_t i = 0; i < sizeof(T); ++i)
                out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
        }

        template <typename T>
        T get_le(std::span<const std::uint8_t> bytes, std::size_t &pos)
        {
            using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
            if (pos + sizeof(T) > bytes.size())
                throw FormatError("vxg: truncated file");
            U bits = 0;
            for (std::size_t i = 0; i < sizeof(T); ++i)
                bits |= static_cast<U>(bytes[pos + i]) << (8 * i);
            pos += sizeof(T);
            return std::bit_cast<T>(bits);
        }
    }

    std::vector<std::uint8_t> encode(const VoxelGrid &grid)
    {
        const Roi &roi = grid.roi();
        std::vector<std::uint8_t> out;
        out.reserve(header_size + 4 * grid.values().size());
        out.insert(out.end(), std::begin(magic), std::end(magic));
        for (std::size_t d : {grid.channels(), roi.dims()[0], roi.dims()[1], roi.dims()[2]})
        {
            if (d > std::numeric_limits<std::uint32_t>::max())
                throw FormatError("vxg: dimension exceeds u32");
            put_le(out, static_cast<std::uint32_t>(d));
        }
        for (int a = 0; a < 3; ++a)
        {
            put_le(out, roi.lower()[a]);
            put_le(out, roi.upper()[a]);
        }
        for (double v : grid.values())
            put_le(out, static_cast<float>(v));
        return out;
    }

    VoxelGrid decode(std::span<const std::uint8_t> bytes)
    {
        if (bytes.size() < 4 || std::memcmp(bytes.data(), magic, 4) != 0)
            throw FormatError("vxg: bad magic");
        std::size_t pos = 4;
        const std::size_t channels = get_le<std::uint32_t>(bytes, pos);
        std::array<std::size_t, 3> dims{};
        for (auto &d : dims)
            d = get_le<std::uint32_t>(bytes, pos);
        std::array<double, 3> lower{}, upper{};
        for (int a = 0; a < 3; ++a)
        {
            lower[a] = get_le<double>(bytes, pos);
            upper[a] = get_le<double>(bytes, pos);
        }
        if (channels == 0)
            throw FormatError("vxg: zero channels");

        Roi roi;
        try
        {
            roi = Roi(lower, upper, dims);
        }
        catch (const ConfigError &e)
        {
            throw FormatError(std::string("vxg: invalid grid header: ") + e.what());
        }

        const std::size_t count = channels * roi.voxel_count();
        if (bytes.size() - pos != 4 * count)
            throw FormatError("vxg: payload size " + std::to_string(bytes.size() - pos) + " bytes, expected " +
                              std::to_string(4 * count));
        std::vector<double> values(count);
        for (auto &v : values)
        {
            const float f = get_le<float>(bytes, pos);
            if (!std::isfinite(f))
                throw FormatError("vxg: non-finite value");
            v = f;
        }
        return VoxelGrid(roi, channels, std::move(values));
    }

    void write(const VoxelGrid &grid, const std::filesystem::path &path)
    {
        const auto bytes = encode(grid);
        if (path.has_parent_path())
        {
            std::error_code ec;
            std::filesystem::create_directories(path.parent_path(), ec);
        }
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os)
            throw IoError("cannot open " + path.string() + " for writing");
        os.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!os)
            throw IoError("write failed: " + path.string());
    }

    VoxelGrid read(const std::filesystem::path &path)
    {
        std::ifstream is(path, std::ios::binary);
        if (!is)
            throw IoError("cannot open " + path.string());
        const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
        try
        {
            return decode(bytes);
        }
        catch (const FormatError &e)
        {
            throw FormatError(path.string() + ": " + e.what());
        }
    }
}
