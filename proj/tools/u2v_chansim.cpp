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

// u2v-chansim command-line front end.
// Exit codes: 0 success, 1 configuration error, 2 stage failure, 3 I/O error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "u2v/errors.hpp"
#include "u2v/manifest.hpp"
#include "u2v/pipeline.hpp"
#include "u2v/scene.hpp"

namespace
{
    enum Exit
    {
        exit_ok = 0,
        exit_config = 1,
        exit_stage = 2,
        exit_io = 3
    };

    struct Globals
    {
        std::string manifest;
        std::optional<std::uint64_t> seed;
        std::string out_dir = ".";
        std::size_t jobs = 1;
    };

    int run_goal(const Globals &g, u2v::pipeline::Goal goal)
    {
        if (g.manifest.empty())
            throw u2v::ConfigError("--manifest is required");
        const auto manifest = u2v::parse_manifest(g.manifest);
        u2v::pipeline::run(manifest, {g.out_dir, g.seed, g.jobs}, goal);
        return exit_ok;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"LiDAR-aided UAV-to-vehicle channel simulation toolkit", "u2v-chansim"};
    app.require_subcommand(1);

    Globals g;
    app.add_option("--manifest", g.manifest, "Scenario manifest (INI)");
    app.add_option("--seed", g.seed, "Override the manifest seed");
    app.add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();
    app.add_option("--jobs", g.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

    auto *preprocess = app.add_subcommand("preprocess", "Build feature grids from LiDAR clouds");
    auto *predict = app.add_subcommand("predict", "Predict and round scatterer grids");
    auto *evaluate = app.add_subcommand("evaluate", "Compare predicted and ground-truth scatterer grids");
    auto *simulate = app.add_subcommand("simulate", "Run the full pipeline");
    auto *stats = app.add_subcommand("stats", "Write TACF, FCF and DPSD CSVs");
    auto *synth = app.add_subcommand("synth-scene", "Generate a synthetic scenario on disk");
    for (auto *sub : {preprocess, predict, evaluate, simulate, stats, synth})
        sub->fallthrough();

    std::string pred_path, truth_path;
    double round_threshold = 0.5;
    evaluate->add_option("--pred", pred_path, "Prediction VXG");
    evaluate->add_option("--truth", truth_path, "Ground-truth VXG");
    evaluate->add_option("--round-threshold", round_threshold, "Rounding threshold")->capture_default_str();

    u2v::scene::SyntheticSceneSpec spec;
    synth->add_option("--vehicles", spec.vehicles, "Vehicle count")->capture_default_str();
    synth->add_option("--buildings", spec.buildings, "Building count")->capture_default_str();
    synth->add_option("--uav-height", spec.uav_height, "UAV height [m]")->capture_default_str();
    synth->add_option("--snapshots", spec.snapshots, "Snapshot count")->capture_default_str();
    synth->add_option("--dt", spec.dt, "Snapshot interval [s]")->capture_default_str();
    synth->add_option("--rays", spec.azimuth_rays, "Azimuth rays per ring")->capture_default_str();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::Success &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return exit_config;
    }

    try
    {
        using Goal = u2v::pipeline::Goal;
        if (*preprocess)
            return run_goal(g, Goal::preprocess);
        if (*predict)
            return run_goal(g, Goal::predict);
        if (*simulate)
            return run_goal(g, Goal::simulate);
        if (*stats)
            return run_goal(g, Goal::stats);
        if (*evaluate)
        {
            if (pred_path.empty() != truth_path.empty())
                throw u2v::ConfigError("--pred and --truth must be given together");
            if (pred_path.empty())
                return run_goal(g, Goal::evaluate);
            if (!(round_threshold > 0.0 && round_threshold <= 1.0))
                throw u2v::ConfigError("--round-threshold must lie in (0, 1]");
            std::cout << u2v::pipeline::evaluate_files(pred_path, truth_path, round_threshold);
            return exit_ok;
        }
        if (g.seed)
            spec.seed = *g.seed;
        const auto summary = u2v::scene::synth_scene(spec, g.out_dir);
        std::cout << "manifest: " << summary.manifest.string() << "\n"
                  << "moving_objects: " << summary.moving_objects << "\n"
                  << "static_objects: " << summary.static_objects << "\n";
        return exit_ok;
    }
    catch (const u2v::ConfigError &e)
    {
        std::cerr << "u2v-chansim: configuration error: " << e.what() << "\n";
        return exit_config;
    }
    catch (const u2v::IoError &e)
    {
        std::cerr << "u2v-chansim: I/O error: " << e.what() << "\n";
        return exit_io;
    }
    catch (const u2v::StageError &e)
    {
        std::cerr << "u2v-chansim: stage '" << e.stage() << "' failed: " << e.what() << "\n";
        return exit_stage;
    }
    catch (const std::exception &e)
    {
        std::cerr << "u2v-chansim: error: " << e.what() << "\n";
        return exit_stage;
    }
}
