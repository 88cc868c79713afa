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

#include "u2v/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "u2v/csv.hpp"
#include "u2v/errors.hpp"
#include "u2v/manifest.hpp"
#include "u2v/rng.hpp"
#include "u2v/scenario_io.hpp"
#include "u2v/vxg.hpp"

namespace u2v::scene
{
    namespace
    {
        constexpr std::uint64_t stream_buildings = 11;
        constexpr std::uint64_t stream_vehicles = 12;
        constexpr double rx_mount = 0.3; // sensor height above the host roof [m]
        constexpr double lane_offset = 3.5;
        constexpr double face_offset = 1e-6;

        double coord(const Vec3 &v, int axis) { return axis == 0 ? v.x : (axis == 1 ? v.y : v.z); }

        // Parameter interval of o + s*d inside the box, intersected with [s_min, s_max].
        std::optional<std::pair<double, double>> slab(const Vec3 &o, const Vec3 &d, const Box &b, double s_min,
                                                      double s_max)
        {
            double lo = s_min, hi = s_max;
            for (int a = 0; a < 3; ++a)
            {
                const double oa = coord(o, a), da = coord(d, a);
                const double bl = coord(b.lower, a), bu = coord(b.upper, a);
                if (da == 0.0)
                {
                    if (oa < bl || oa > bu)
                        return std::nullopt;
                    continue;
                }
                double t0 = (bl - oa) / da, t1 = (bu - oa) / da;
                if (t0 > t1)
                    std::swap(t0, t1);
                lo = std::max(lo, t0);
                hi = std::min(hi, t1);
                if (lo > hi)
                    return std::nullopt;
            }
            return std::pair{lo, hi};
        }

        Vec3 lane_direction(std::size_t lane)
        {
            switch (lane)
            {
            case 0: return {1.0, 0.0, 0.0};
            case 1: return {-1.0, 0.0, 0.0};
            case 2: return {0.0, 1.0, 0.0};
            default: return {0.0, -1.0, 0.0};
            }
        }

        Trajectory sampled(const SyntheticSceneSpec &spec, const Vec3 &start, const Vec3 &velocity)
        {
            const double heading = (velocity.x == 0.0 && velocity.y == 0.0) ? 0.0 : std::atan2(velocity.y, velocity.x);
            std::vector<TrajectorySample> samples;
            samples.reserve(spec.snapshots);
            for (std::size_t i = 0; i < spec.snapshots; ++i)
            {
                const double elapsed = static_cast<double>(i) * spec.dt;
                samples.push_back({spec.start_time + elapsed, Pose(start + velocity * elapsed, heading), velocity});
            }
            return Trajectory(std::move(samples));
        }

        std::string to_text(const auto &writer)
        {
            std::ostringstream os;
            writer(os);
            return os.str();
        }
    }

    std::optional<double> ray_box(const Vec3 &origin, const Vec3 &dir, const Box &box)
    {
        const auto iv = slab(origin, dir, box, 0.0, std::numeric_limits<double>::infinity());
        if (!iv)
            return std::nullopt;
        return iv->first;
    }

    bool segment_hits(const Vec3 &a, const Vec3 &b, const Box &box)
    {
        const auto iv = slab(a, b - a, box, 0.0, 1.0);
        return iv && iv->second - iv->first > 1e-12;
    }

    void SyntheticSceneSpec::validate() const
    {
        if (snapshots < 1)
            throw ConfigError("synthetic scene: snapshots must be >= 1");
        if (!(dt > 0.0))
            throw ConfigError("synthetic scene: dt must be > 0");
        if (rings < 1 || azimuth_rays < 1)
            throw ConfigError("synthetic scene: rings and azimuth_rays must be >= 1");
        if (!(uav_height > height_threshold))
            throw ConfigError("synthetic scene: uav_height must exceed the height threshold");
        if (!(min_speed >= 0.0 && max_speed >= min_speed))
            throw ConfigError("synthetic scene: invalid speed range");
        if (!(vehicle_size.x > 0.0 && vehicle_size.y > 0.0 && vehicle_size.z > 0.0))
            throw ConfigError("synthetic scene: vehicle dimensions must be > 0");
        if (!(max_range > 0.0) || !(scatterer_spacing > 0.0))
            throw ConfigError("synthetic scene: max_range and scatterer_spacing must be > 0");
        if (!(height_threshold >= 0.0))
            throw ConfigError("synthetic scene: height_threshold must be >= 0");
    }

    SceneLayout layout_scene(const SyntheticSceneSpec &spec)
    {
        spec.validate();
        SceneLayout layout;

        Rng brng = make_rng(spec.seed, stream_buildings);
        std::uniform_real_distribution<double> offset(25.0, 70.0), side(10.0, 25.0), height(10.0, 35.0);
        for (std::size_t k = 0; k < spec.buildings; ++k)
        {
            const double sx = (k % 4 == 0 || k % 4 == 3) ? 1.0 : -1.0;
            const double sy = (k % 4 < 2) ? 1.0 : -1.0;
            const double cx = sx * offset(brng), cy = sy * offset(brng);
            const double wx = side(brng), wy = side(brng), h = height(brng);
            layout.objects.push_back({layout.objects.size(), ObjectKind::building,
                                      Box{{cx - wx / 2, cy - wy / 2, 0.0}, {cx + wx / 2, cy + wy / 2, h}}, {}});
        }

        Rng vrng = make_rng(spec.seed, stream_vehicles);
        std::uniform_real_distribution<double> jitter(-2.0, 2.0), speed(spec.min_speed, spec.max_speed);
        std::array<std::size_t, 4> per_lane{};
        for (std::size_t i = 0; i < spec.vehicles; ++i)
            ++per_lane[i % 4];
        std::array<std::size_t, 4> placed{};
        const auto &vs = spec.vehicle_size;
        for (std::size_t i = 0; i < spec.vehicles; ++i)
        {
            const std::size_t lane = i % 4;
            const Vec3 dir = lane_direction(lane);
            const double s = -80.0 + (static_cast<double>(placed[lane]++) + 0.5) * 160.0 /
                                         static_cast<double>(per_lane[lane]) + jitter(vrng);
            const double v = speed(vrng);
            // lanes keep right: the lateral offset is the travel direction rotated by -90 degrees
            const Vec3 lateral{dir.y, -dir.x, 0.0};
            const Vec3 center = dir * s + lateral * lane_offset;
            const double half_x = (lane < 2 ? vs.x : vs.y) / 2, half_y = (lane < 2 ? vs.y : vs.x) / 2;
            const Box box{{center.x - half_x, center.y - half_y, 0.0}, {center.x + half_x, center.y + half_y, vs.z}};
            if (i == 0)
                layout.host = layout.objects.size();
            layout.objects.push_back({layout.objects.size(), ObjectKind::vehicle, box, dir * v});
        }

        if (layout.host)
        {
            const auto &h = layout.objects[*layout.host];
            const Vec3 mount{(h.box.lower.x + h.box.upper.x) / 2, (h.box.lower.y + h.box.upper.y) / 2,
                             h.box.upper.z + rx_mount};
            layout.rx = sampled(spec, mount, h.velocity);
        }
        else
            layout.rx = sampled(spec, {10.0, -lane_offset, vs.z + rx_mount}, {});
        layout.tx = sampled(spec, {-30.0, 20.0, spec.uav_height}, spec.uav_velocity);
        return layout;
    }

    lidar::PointCloud scan(const SceneLayout &layout, const Pose &sensor, double elapsed, double elevation_min_deg,
                           double elevation_max_deg, const SyntheticSceneSpec &spec)
    {
        std::vector<Box> boxes;
        for (const auto &obj : layout.objects)
            if (!layout.host || obj.id != *layout.host)
                boxes.push_back(obj.at(elapsed));

        lidar::PointCloud cloud;
        cloud.frame = lidar::Frame::world;
        const Vec3 &o = sensor.position;
        for (std::size_t r = 0; r < spec.rings; ++r)
        {
            const double frac = spec.rings == 1 ? 0.0 : static_cast<double>(r) / static_cast<double>(spec.rings - 1);
            const double el = (elevation_min_deg + frac * (elevation_max_deg - elevation_min_deg)) * pi / 180.0;
            for (std::size_t a = 0; a < spec.azimuth_rays; ++a)
            {
                const double az = sensor.heading + 2.0 * pi * static_cast<double>(a) /
                                                       static_cast<double>(spec.azimuth_rays);
                const Vec3 d{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
                double best = spec.max_range;
                bool hit = false;
                if (d.z < 0.0)
                {
                    const double s = -o.z / d.z;
                    if (s <= best)
                        best = s, hit = true;
                }
                for (const auto &b : boxes)
                    if (auto s = ray_box(o, d, b); s && *s <= best)
                        best = *s, hit = true;
                if (hit)
                {
                    Vec3 p = o + d * best;
                    if (d.z < 0.0 && std::abs(p.z) < 1e-9)
                        p.z = 0.0;
                    cloud.points.push_back(p);
                }
            }
        }
        return cloud;
    }

    scatter::ScattererGrid truth_scatterers(const SceneLayout &layout, double elapsed, const Vec3 &tx_pos,
                                            const Vec3 &rx_pos, const SyntheticSceneSpec &spec)
    {
        std::vector<Box> boxes;
        for (const auto &obj : layout.objects)
            if (!layout.host || obj.id != *layout.host)
                boxes.push_back(obj.at(elapsed));

        scatter::ScattererGrid grid(spec.roi);
        auto visible = [&](const Vec3 &p, const Vec3 &n, const Vec3 &s)
        {
            if (dot(s - p, n) <= 0.0)
                return false;
            const Vec3 start = p + n * face_offset;
            return std::none_of(boxes.begin(), boxes.end(), [&](const Box &b) { return segment_hits(start, s, b); });
        };

        for (const auto &b : boxes)
        {
            // five faces (the bottom rests on the ground): normal axis, sign
            const std::array<std::pair<int, double>, 5> faces{{{0, -1.0}, {0, 1.0}, {1, -1.0}, {1, 1.0}, {2, 1.0}}};
            for (const auto &[axis, sign] : faces)
            {
                const int u = (axis + 1) % 3, v = (axis + 2) % 3;
                const double ul = coord(b.lower, u), uu = coord(b.upper, u);
                const double vl = coord(b.lower, v), vu = coord(b.upper, v);
                const auto nu = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround((uu - ul) / spec.scatterer_spacing)));
                const auto nv = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround((vu - vl) / spec.scatterer_spacing)));
                const double fixed = sign > 0 ? coord(b.upper, axis) : coord(b.lower, axis);
                Vec3 n{};
                (axis == 0 ? n.x : (axis == 1 ? n.y : n.z)) = sign;
                for (std::size_t i = 0; i < nu; ++i)
                    for (std::size_t j = 0; j < nv; ++j)
                    {
                        std::array<double, 3> c{};
                        c[axis] = fixed;
                        c[u] = ul + (static_cast<double>(i) + 0.5) * (uu - ul) / static_cast<double>(nu);
                        c[v] = vl + (static_cast<double>(j) + 0.5) * (vu - vl) / static_cast<double>(nv);
                        const Vec3 p{c[0], c[1], c[2]};
                        if (p.z < spec.height_threshold || !visible(p, n, tx_pos) || !visible(p, n, rx_pos))
                            continue;
                        if (auto idx = spec.roi.index_of(p))
                            ++grid.at(*idx);
                    }
            }
        }
        return grid;
    }

    SceneSummary synth_scene(const SyntheticSceneSpec &spec, const std::filesystem::path &out_dir)
    {
        const SceneLayout layout = layout_scene(spec);
        SceneSummary summary;
        for (const auto &obj : layout.objects)
            ++(obj.kind == ObjectKind::vehicle ? summary.moving_objects : summary.static_objects);

        io::write_text(out_dir / "trajectories" / "tx.csv", to_text([&](std::ostream &os)
                                                                    { io::write_trajectory(os, layout.tx); }));
        io::write_text(out_dir / "trajectories" / "rx.csv", to_text([&](std::ostream &os)
                                                                    { io::write_trajectory(os, layout.rx); }));

        std::filesystem::create_directories(out_dir / "truth");
        for (std::size_t i = 0; i < spec.snapshots; ++i)
        {
            const double elapsed = static_cast<double>(i) * spec.dt;
            const TrajectorySample &txs = layout.tx.samples()[i];
            const TrajectorySample &rxs = layout.rx.samples()[i];
            const auto tx_cloud = lidar::to_sensor_local(
                scan(layout, txs.pose, elapsed, spec.tx_elevation_min_deg, spec.tx_elevation_max_deg, spec), txs.pose);
            const auto rx_cloud = lidar::to_sensor_local(
                scan(layout, rxs.pose, elapsed, spec.rx_elevation_min_deg, spec.rx_elevation_max_deg, spec), rxs.pose);
            io::write_text(out_dir / "clouds" / ("tx_" + expand_pattern("{i}", i) + ".csv"),
                           to_text([&](std::ostream &os) { io::write_cloud(os, tx_cloud); }));
            io::write_text(out_dir / "clouds" / ("rx_" + expand_pattern("{i}", i) + ".csv"),
                           to_text([&](std::ostream &os) { io::write_cloud(os, rx_cloud); }));
            scatter::store_scatterers(truth_scatterers(layout, elapsed, txs.pose.position, rxs.pose.position, spec),
                                      out_dir / "truth" / ("truth_" + expand_pattern("{i}", i) + ".vxg"));
        }

        std::ostringstream objects;
        objects << "id,kind,x_min,y_min,z_min,x_max,y_max,z_max,vx,vy,vz\n";
        for (const auto &obj : layout.objects)
        {
            objects << obj.id << ',' << (obj.kind == ObjectKind::vehicle ? "vehicle" : "building");
            for (const Vec3 &v : {obj.box.lower, obj.box.upper, obj.velocity})
                objects << ',' << csv::num(v.x) << ',' << csv::num(v.y) << ',' << csv::num(v.z);
            objects << '\n';
        }
        io::write_text(out_dir / "objects.csv", objects.str());

        const auto &lo = spec.roi.lower();
        const auto &hi = spec.roi.upper();
        const auto &g = spec.roi.dims();
        std::ostringstream m;
        m << "# synthetic scene: " << spec.vehicles << " vehicles, " << spec.buildings << " buildings, seed "
          << spec.seed << "\n\n"
          << "[scenario]\n"
          << "snapshots = " << spec.snapshots << "\n"
          << "dt = " << csv::num(spec.dt) << "\n"
          << "start_time = " << csv::num(spec.start_time) << "\n"
          << "seed = " << spec.seed << "\n"
          << "transform_convention = conventional\n"
          << "height_threshold = " << csv::num(spec.height_threshold) << "\n"
          << "cluster_height = 3\n\n"
          << "[roi]\n"
          << "x_min = " << csv::num(lo[0]) << "\nx_max = " << csv::num(hi[0]) << "\n"
          << "y_min = " << csv::num(lo[1]) << "\ny_max = " << csv::num(hi[1]) << "\n"
          << "z_min = " << csv::num(lo[2]) << "\nz_max = " << csv::num(hi[2]) << "\n"
          << "g_x = " << g[0] << "\ng_y = " << g[1] << "\ng_z = " << g[2] << "\n\n"
          << "[rf]\n"
          << "carrier_hz = 28e9\n"
          << "bandwidth_hz = 2e9\n\n"
          << "[files]\n"
          << "tx_trajectory = trajectories/tx.csv\n"
          << "rx_trajectory = trajectories/rx.csv\n"
          << "tx_clouds = clouds/tx_{i}.csv\n"
          << "rx_clouds = clouds/rx_{i}.csv\n"
          << "cloud_frame = local\n"
          << "truth_grids = truth/truth_{i}.vxg\n\n"
          << "[predictor]\n"
          << "kind = baseline\n"
          << "calibrate = " << (spec.snapshots >= 5 ? "true" : "false") << "\n\n"
          << "[stats]\n"
          << "realizations = 20\n"
          << "max_lag = " << std::min<std::size_t>(100, spec.snapshots - 1) << "\n";
        summary.manifest = out_dir / "manifest.ini";
        io::write_text(summary.manifest, m.str());
        return summary;
    }
}
