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

#ifndef U2V_ERRORS_HPP
#define U2V_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace u2v
{
    // Base class of every error raised by the library
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Invalid configuration value or manifest entry
    class ConfigError : public Error
    {
    public:
        using Error::Error;
    };

    // Malformed or inconsistent file contents (VXG, CSV)
    class FormatError : public Error
    {
    public:
        using Error::Error;
    };

    // Argument outside the mathematical domain of an operation (f <= 0, t outside support)
    class DomainError : public Error
    {
    public:
        using Error::Error;
    };

    // Degenerate geometry: coincident points, non-positive heights
    class GeometryError : public Error
    {
    public:
        using Error::Error;
    };

    // Caller misuse: mismatched shapes, wrong frames, empty inputs
    class UsageError : public Error
    {
    public:
        using Error::Error;
    };

    // File system failure
    class IoError : public Error
    {
    public:
        using Error::Error;
    };

    // Failure of one pipeline stage; carries the stage name for the CLI
    class StageError : public Error
    {
    public:
        StageError(std::string stage, const std::string &what)
            : Error(stage + ": " + what), stage_(std::move(stage)) {}
        const std::string &stage() const noexcept { return stage_; }

    private:
        std::string stage_;
    };
}

#endif
