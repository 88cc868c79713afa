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

#include "u2v/channel.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "u2v/csv.hpp"

namespace u2v::channel
{
    const char *to_string(PathKind kind)
    {
        switch (kind)
        {
        case PathKind::los:
            return "los";
        case PathKind::nlos:
            return "nlos";
        case PathKind::ground:
            return "gr";
        }
        return "?";
    }

    void StochasticParams::validate() const
    {
        if (!(xi >= 0.0) || !std::isfinite(xi))
            throw ConfigError("stochastic.xi must be >= 0");
        if (!std::isfinite(eta))
            throw ConfigError("stochastic.eta must be finite");
        if (!(sigma_e_db >= 0.0) || !std::isfinite(sigma_e_db))
            throw ConfigError("stochastic.sigma_e_db must be >= 0");
        if (!(virtual_delay_rate > 0.0))
            throw ConfigError("stochastic.virtual_delay_rate must be > 0");
    }

    void ChannelModelConfig::validate() const
    {
        rf.validate();
        stochastic.validate();
        if (!(ground.reflection_coefficient >= 0.0 && ground.reflection_coefficient <= 1.0))
            throw ConfigError("stochastic.gamma must lie in [0, 1]");
    }

    ClusterDraws draw_cluster(const StochasticParams &params, Rng &rng)
    {
        ClusterDraws d;
        d.virtual_delay = std::isinf(params.virtual_delay_rate)
                              ? 0.0
                              : std::exponential_distribution<double>(params.virtual_delay_rate)(rng);
        d.phi0 = std::uniform_real_distribution<double>(0.0, 2.0 * pi)(rng);
        d.shadowing_db = params.sigma_e_db > 0.0 ? std::normal_distribution<double>(0.0, params.sigma_e_db)(rng) : 0.0;
        return d;
    }

    // ----- geometry ----------------------------------------------------------

    Vec3 tx_rx_distance(const Trajectory &tx, const Trajectory &rx, double t0, double t)
    {
        if (t < t0)
            throw DomainError("tx_rx_distance: t precedes the reference time t0");
        if (!tx.covers(t0) || !tx.covers(t) || !rx.covers(t0) || !rx.covers(t))
            throw DomainError("tx_rx_distance: time outside the trajectory support");
        const Vec3 d0 = rx.position_at(t0) - tx.position_at(t0);
        const Vec3 int_r = rx.integrated_velocity(t) - rx.integrated_velocity(t0);
        const Vec3 int_t = tx.integrated_velocity(t) - tx.integrated_velocity(t0);
        return d0 + int_r - int_t;
    }

    int window(double t, double t0, double T0)
    {
        return (t >= t0 && t <= T0) ? 1 : 0;
    }

    namespace
    {
        double radial_doppler(const Vec3 &d, const Vec3 &relative_velocity, double lambda)
        {
            return dot(d, relative_velocity) / (lambda * norm(d));
        }

        void require_separated(const Vec3 &d, const char *what)
        {
            if (!(norm(d) > 0.0))
                throw GeometryError(std::string(what) + ": coincident endpoints");
        }
    }

    PathComponent los_component(const Trajectory &tx, const Trajectory &rx, const RfConfig &rf, double t, double phi0)
    {
        const double lambda = rf.wavelength();
        const Vec3 d = tx_rx_distance(tx, rx, rf.window_start, t);
        require_separated(d, "los_component");
        const double range = norm(d);

        PathComponent c;
        c.kind = PathKind::los;
        c.amplitude = 1.0;
        c.doppler_hz = radial_doppler(d, rx.velocity_at(t) - tx.velocity_at(t), lambda);
        c.phase = phi0 + 2.0 * pi / lambda * range;
        c.delay = range / speed_of_light;
        return c;
    }

    double cluster_power(double delay, const StochasticParams &params, double shadowing_db)
    {
        if (!(delay >= 0.0))
            throw DomainError("cluster_power: delay must be non-negative");
        return std::exp(-params.xi * delay - params.eta) * std::pow(10.0, -shadowing_db / 10.0);
    }

    double cluster_power(double delay, const StochasticParams &params, Rng &rng)
    {
        const double z = params.sigma_e_db > 0.0 ? std::normal_distribution<double>(0.0, params.sigma_e_db)(rng) : 0.0;
        return cluster_power(delay, params, z);
    }

    std::vector<double> normalize_powers(std::span<const double> powers)
    {
        double sum = 0.0;
        for (double p : powers)
            sum += p;
        std::vector<double> out(powers.begin(), powers.end());
        if (sum > 0.0)
            for (double &p : out)
                p /= sum;
        return out;
    }

    double nlos_delay(const Vec3 &cluster_center, const Vec3 &tx_pos, const Vec3 &rx_pos, double virtual_delay)
    {
        return (distance(tx_pos, cluster_center) + distance(rx_pos, cluster_center)) / speed_of_light + virtual_delay;
    }

    PathComponent nlos_component(const clusters::Cluster &cluster, const Trajectory &tx, const Trajectory &rx,
                                 const RfConfig &rf, const ClusterDraws &draws, double normalized_power,
                                 AmplitudeMode mode, double t)
    {
        const double lambda = rf.wavelength();
        const Vec3 tx_pos = tx.position_at(t);
        const Vec3 rx_pos = rx.position_at(t);
        // legs point from the cluster towards each transceiver
        const Vec3 d_t = tx_pos - cluster.center;
        const Vec3 d_r = rx_pos - cluster.center;
        require_separated(d_t, "nlos_component (Tx leg)");
        require_separated(d_r, "nlos_component (Rx leg)");
        if (!(normalized_power >= 0.0))
            throw DomainError("nlos_component: negative cluster power");

        const double n = static_cast<double>(cluster.count);
        const double scale = mode == AmplitudeMode::linear_count ? n : std::sqrt(n);

        PathComponent c;
        c.kind = PathKind::nlos;
        c.track_id = cluster.track_id;
        c.amplitude = scale * std::sqrt(normalized_power);
        c.doppler_hz = radial_doppler(d_t, tx.velocity_at(t) - cluster.velocity, lambda) +
                       radial_doppler(d_r, rx.velocity_at(t) - cluster.velocity, lambda);
        const double path = norm(d_t) + norm(d_r);
        c.phase = draws.phi0 + 2.0 * pi / lambda * (path + speed_of_light * draws.virtual_delay);
        c.delay = path / speed_of_light + draws.virtual_delay;
        return c;
    }

    PathComponent ground_reflection(const Trajectory &tx, const Trajectory &rx, const RfConfig &rf,
                                    const GroundConfig &ground, double t, double phi0)
    {
        const Vec3 tx_pos = tx.position_at(t);
        const Vec3 rx_pos = rx.position_at(t);
        if (!(tx_pos.z > 0.0) || !(rx_pos.z > 0.0))
            throw GeometryError("ground_reflection: transceiver heights must be positive");
        if (!(ground.reflection_coefficient >= 0.0 && ground.reflection_coefficient <= 1.0))
            throw ConfigError("ground reflection coefficient must lie in [0, 1]");

        const double lambda = rf.wavelength();
        const Vec3 v_t = tx.velocity_at(t);
        const Vec3 image_pos{tx_pos.x, tx_pos.y, -tx_pos.z};
        const Vec3 image_vel{v_t.x, v_t.y, -v_t.z};
        const Vec3 d = rx_pos - image_pos;
        const double length = norm(d);

        PathComponent c;
        c.kind = PathKind::ground;
        c.amplitude = ground.reflection_coefficient; // sqrt(Gamma^2)
        c.doppler_hz = radial_doppler(d, rx.velocity_at(t) - image_vel, lambda);
        c.phase = phi0 + 2.0 * pi / lambda * length;
        c.delay = length / speed_of_light;
        return c;
    }

    double effective_ricean(const PathComponent &los, const PathComponent &gr, std::span<const PathComponent> nlos,
                            const RfConfig &rf)
    {
        if (rf.ricean)
        {
            if (!(*rf.ricean >= 0.0))
                throw ConfigError("Ricean factor must be non-negative");
            return *rf.ricean;
        }
        double diffuse = gr.amplitude * gr.amplitude;
        for (const auto &c : nlos)
            diffuse += c.amplitude * c.amplitude;
        const double los_power = los.amplitude * los.amplitude;
        return diffuse > 0.0 ? los_power / diffuse : std::numeric_limits<double>::infinity();
    }

    std::vector<PathComponent> compose_cir(const PathComponent &los, const PathComponent &gr,
                                           std::span<const PathComponent> nlos, const RfConfig &rf)
    {
        if (!(rf.eta_gr >= 0.0 && rf.eta_gr <= 1.0))
            throw ConfigError("eta_gr must lie in [0, 1]");
        const double omega = effective_ricean(los, gr, nlos, rf);

        double w_los = 1.0, w_nlos = 0.0, w_gr = 0.0;
        if (std::isfinite(omega))
        {
            w_los = std::sqrt(omega / (omega + 1.0));
            w_nlos = std::sqrt(rf.eta_nlos() / (omega + 1.0));
            w_gr = std::sqrt(rf.eta_gr / (omega + 1.0));
        }

        std::vector<PathComponent> taps;
        taps.reserve(nlos.size() + 2);
        taps.push_back(los);
        taps.back().weight = w_los;
        taps.push_back(gr);
        taps.back().weight = w_gr;
        for (const auto &c : nlos)
        {
            taps.push_back(c);
            taps.back().weight = w_nlos;
        }
        return taps;
    }

    std::complex<double> transfer_function(std::span<const PathComponent> taps, double f, const RfConfig &rf)
    {
        if (!(f > 0.0))
            throw DomainError("transfer_function: frequency must be positive");
        const double scale = rf.chi == 0.0 ? 1.0 : std::pow(f / rf.carrier_hz, rf.chi);
        std::complex<double> h_los{}, h_diffuse{};
        for (const auto &c : taps)
        {
            const std::complex<double> term = c.weight * c.gain() * std::polar(1.0, -2.0 * pi * f * c.delay);
            if (c.kind == PathKind::los)
                h_los += term;
            else
                h_diffuse += term;
        }
        return h_los + scale * h_diffuse;
    }

    // ----- realizations --------------------------------------------------------

    std::size_t ChannelRealization::index_of(double t) const
    {
        const double tol = 1e-9 * std::max(1.0, std::abs(t));
        auto it = std::lower_bound(times.begin(), times.end(), t - tol);
        if (it == times.end() || std::abs(*it - t) > tol)
            throw DomainError("time " + csv::num(t) + " s is not a snapshot of the realization");
        return static_cast<std::size_t>(std::distance(times.begin(), it));
    }

    ChannelSimulator::ChannelSimulator(Trajectory tx, Trajectory rx, std::vector<clusters::ClusterSet> sets,
                                       ChannelModelConfig cfg)
        : tx_(std::move(tx)), rx_(std::move(rx)), sets_(std::move(sets)), cfg_(std::move(cfg))
    {
        cfg_.validate();
        for (std::size_t k = 1; k < sets_.size(); ++k)
            if (!(sets_[k].time > sets_[k - 1].time))
                throw UsageError("ChannelSimulator: cluster sets must be strictly time-ordered");
        for (const auto &s : sets_)
            if (window(s.time, cfg_.rf.window_start, cfg_.rf.window_end) && (!tx_.covers(s.time) || !rx_.covers(s.time)))
                throw DomainError("ChannelSimulator: snapshot at " + csv::num(s.time) + " s outside trajectory support");
    }

    namespace
    {
        enum : std::uint64_t
        {
            stream_los = 1,
            stream_ground = 2,
            stream_cluster = 3,
        };

        struct PhaseAccumulator
        {
            std::size_t last_active = std::numeric_limits<std::size_t>::max();
            double last_doppler = 0.0;
            double integral = 0.0;

            // Trapezoidal 2 pi int f dt; restarts when the path was absent at the previous active snapshot
            double advance(std::size_t active_index, double doppler, double h)
            {
                if (last_active != std::numeric_limits<std::size_t>::max() && last_active + 1 == active_index)
                    integral += pi * (last_doppler + doppler) * h;
                else
                    integral = 0.0;
                last_active = active_index;
                last_doppler = doppler;
                return integral;
            }
        };

        std::uint64_t cluster_key(const clusters::ClusterSet &set, const clusters::Cluster &c)
        {
            if (c.track_id >= 0)
                return static_cast<std::uint64_t>(c.track_id);
            return (std::uint64_t{1} << 48) + set.roi.flat(c.voxel);
        }
    }

    ChannelRealization ChannelSimulator::realize(std::uint64_t seed) const
    {
        const RfConfig &rf = cfg_.rf;
        ChannelRealization out;
        out.rf = rf;
        out.seed = seed;
        out.times.reserve(sets_.size());
        out.taps.resize(sets_.size());

        Rng los_rng = make_rng(seed, stream_los);
        Rng gr_rng = make_rng(seed, stream_ground);
        const double phi0_los = std::uniform_real_distribution<double>(0.0, 2.0 * pi)(los_rng);
        const double phi0_gr = std::uniform_real_distribution<double>(0.0, 2.0 * pi)(gr_rng);

        std::map<std::uint64_t, ClusterDraws> draws;
        std::map<std::uint64_t, PhaseAccumulator> cluster_phase;
        PhaseAccumulator los_phase, gr_phase;

        std::size_t active = 0;
        double previous_time = 0.0;
        for (std::size_t k = 0; k < sets_.size(); ++k)
        {
            const auto &set = sets_[k];
            const double t = set.time;
            out.times.push_back(t);
            if (!window(t, rf.window_start, rf.window_end))
                continue;
            const double h = active == 0 ? 0.0 : t - previous_time;

            PathComponent los = los_component(tx_, rx_, rf, t, phi0_los);
            los.doppler_integral = los_phase.advance(active, los.doppler_hz, h);
            PathComponent gr = ground_reflection(tx_, rx_, rf, cfg_.ground, t, phi0_gr);
            gr.doppler_integral = gr_phase.advance(active, gr.doppler_hz, h);

            const Vec3 tx_pos = tx_.position_at(t);
            const Vec3 rx_pos = rx_.position_at(t);
            std::vector<double> powers;
            std::vector<const ClusterDraws *> cluster_draws;
            powers.reserve(set.clusters.size());
            for (const auto &c : set.clusters)
            {
                const std::uint64_t key = cluster_key(set, c);
                auto it = draws.find(key);
                if (it == draws.end())
                {
                    Rng rng = make_rng(seed, stream_cluster, key);
                    it = draws.emplace(key, draw_cluster(cfg_.stochastic, rng)).first;
                }
                cluster_draws.push_back(&it->second);
                powers.push_back(cluster_power(nlos_delay(c.center, tx_pos, rx_pos, it->second.virtual_delay),
                                               cfg_.stochastic, it->second.shadowing_db));
            }
            const std::vector<double> normalized = normalize_powers(powers);

            std::vector<PathComponent> nlos;
            nlos.reserve(set.clusters.size());
            for (std::size_t i = 0; i < set.clusters.size(); ++i)
            {
                const auto &c = set.clusters[i];
                PathComponent p = nlos_component(c, tx_, rx_, rf, *cluster_draws[i], normalized[i],
                                                 cfg_.amplitude_mode, t);
                p.track_id = c.track_id;
                p.doppler_integral = cluster_phase[cluster_key(set, c)].advance(active, p.doppler_hz, h);
                nlos.push_back(p);
            }

            out.taps[k] = compose_cir(los, gr, nlos, rf);
            previous_time = t;
            ++active;
        }
        return out;
    }

    std::vector<clusters::ClusterSet> empty_cluster_sets(const Roi &roi, double start, double dt, std::size_t n)
    {
        std::vector<clusters::ClusterSet> sets(n);
        for (std::size_t k = 0; k < n; ++k)
        {
            sets[k].time = start + static_cast<double>(k) * dt;
            sets[k].roi = roi;
        }
        return sets;
    }

    void write_cir_csv(std::ostream &os, const ChannelRealization &r)
    {
        os << "t,tap_kind,track_id,amplitude,phase,delay_s,doppler_hz,weight\n";
        for (std::size_t k = 0; k < r.times.size(); ++k)
            for (const auto &c : r.taps[k])
                os << csv::num(r.times[k]) << ',' << to_string(c.kind) << ',' << c.track_id << ','
                   << csv::num(c.amplitude) << ',' << csv::num(c.phase) << ',' << csv::num(c.delay) << ','
                   << csv::num(c.doppler_hz) << ',' << csv::num(c.weight) << '\n';
    }

    VoxelGrid transfer_grid(const ChannelRealization &r, std::span<const double> frequencies)
    {
        if (r.times.empty() || frequencies.empty())
            throw UsageError("transfer_grid: need at least one time and one frequency");
        const double dt = r.times.size() > 1 ? r.times[1] - r.times[0] : 1.0;
        const double df = frequencies.size() > 1 ? frequencies[1] - frequencies[0] : 1.0;
        if (!(dt > 0.0) || !(df > 0.0))
            throw UsageError("transfer_grid: axes must be increasing");
        const Roi roi({r.times.front(), frequencies.front(), 0.0},
                      {r.times.front() + dt * static_cast<double>(r.times.size()),
                       frequencies.front() + df * static_cast<double>(frequencies.size()), 1.0},
                      {r.times.size(), frequencies.size(), 1});
        VoxelGrid grid(roi, 2, 0.0);
        for (std::size_t k = 0; k < r.times.size(); ++k)
            for (std::size_t i = 0; i < frequencies.size(); ++i)
            {
                const auto h = r.transfer(k, frequencies[i]);
                grid.at(0, {k, i, 0}) = h.real();
                grid.at(1, {k, i, 0}) = h.imag();
            }
        return grid;
    }
}
