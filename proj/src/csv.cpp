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

#include "u2v/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

#include "u2v/errors.hpp"

namespace u2v::csv
{
    std::string num(double value)
    {
        if (value == 0.0)
            return "0"; // folds -0
        std::array<char, 32> buf{};
        auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
        return std::string(buf.data(), end);
    }

    std::vector<std::string_view> split(std::string_view line)
    {
        std::vector<std::string_view> out;
        std::size_t start = 0;
        while (true)
        {
            const std::size_t comma = line.find(',', start);
            std::string_view field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
            while (!field.empty() && (field.front() == ' ' || field.front() == '\t'))
                field.remove_prefix(1);
            while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
                field.remove_suffix(1);
            out.push_back(field);
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        return out;
    }

    double parse_double(std::string_view field, const std::string &context)
    {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v))
            throw FormatError(context + ": invalid number '" + std::string(field) + "'");
        return v;
    }

    Table read_table(const std::filesystem::path &path, const std::vector<std::string> &expected_header)
    {
        std::ifstream is(path);
        if (!is)
            throw IoError("cannot open " + path.string());

        Table table;
        std::string line;
        std::size_t line_no = 0;
        bool have_header = false;
        while (std::getline(is, line))
        {
            ++line_no;
            if (line.empty() || line == "\r" || line.front() == '#')
                continue;
            const auto fields = split(line);
            if (!have_header)
            {
                for (auto f : fields)
                    table.header.emplace_back(f);
                if (table.header != expected_header)
                {
                    std::string want;
                    for (const auto &h : expected_header)
                        want += (want.empty() ? "" : ",") + h;
                    throw FormatError(path.string() + ": expected header '" + want + "'");
                }
                have_header = true;
                continue;
            }
            if (fields.size() != expected_header.size())
                throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(expected_header.size()) + " fields");
            std::vector<double> row;
            row.reserve(fields.size());
            for (auto f : fields)
                row.push_back(parse_double(f, path.string() + ":" + std::to_string(line_no)));
            table.rows.push_back(std::move(row));
        }
        if (!have_header)
            throw FormatError(path.string() + ": missing header");
        return table;
    }
}
