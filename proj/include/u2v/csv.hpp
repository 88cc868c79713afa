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

#ifndef U2V_CSV_HPP
#define U2V_CSV_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace u2v::csv
{
    // Shortest representation that round-trips to the same double
    std::string num(double value);

    // Splits one CSV line on commas (no quoting support; none of our files need it)
    std::vector<std::string_view> split(std::string_view line);

    double parse_double(std::string_view field, const std::string &context);

    // Numeric table with a mandatory header row. Blank lines and lines starting with '#' are skipped.
    struct Table
    {
        std::vector<std::string> header;
        std::vector<std::vector<double>> rows;
    };

    // Throws IoError if unreadable, FormatError if the header differs from `expected_header`
    Table read_table(const std::filesystem::path &path, const std::vector<std::string> &expected_header);
}

#endif
