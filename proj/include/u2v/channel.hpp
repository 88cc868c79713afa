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

#ifndef U2V_CHANNEL_HPP
#define U2V_CHANNEL_HPP

#include <complex>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "u2v/clusters.hpp"
#include "u2v/core.hpp"
#include "u2v/rng.hpp"

namespace u2v::channel
{
    enum class PathKind
    {
        los,
        nlos,
        ground
    };

    const char *to_string(PathKind kind);

    // One tap of the CIR at one time instant. The complex gain (without the mixing weight) is
    // amplitude * exp(j (doppler_integral + phase)).
    struct PathComponent
    {
        PathKind kind = PathKind::los;
        std::int64_t track_id = -1; // cluster track for NLoS taps
        double amplitude = 0.0;
        double phase = 0.0;            // [rad] initial phase plus propagation phase 2 pi d / lambda
        double delay = 0.0;            // [s]
        double doppler_hz = 0.0;       // instantaneous Doppler frequency (sum of both legs for NLoS/GR)
        double doppler_integral = 0.0; // [rad] 2 pi times the accumulated Doppler since the path appeared
        double weight = 1.0;           // mixing coefficient (Ricean factor and power shares)

        std::complex<double> gain() const { return std::polar(amplitude, doppler_integral + phase); }
    };

    struct StochasticParams
    {
        double xi = 6.6e6;                // delay decay [1/s]
        double eta = 0.0;                 // power offset
        double sigma_e_db = 3.0;          // shadowing std [dB]
        double virtual_delay_rate = 1e8;  // rate of the exponential virtual-link delay [1/s]

        void validate() const;
    };

    enum class AmplitudeMode
    {
        linear_count, // N_l * sqrt(P_l)
        sqrt_count    // sqrt(N_l) * sqrt(P_l)
    };

    struct GroundConfig
    {
        double reflection_coefficient = 0.5; // Gamma in [0, 1]; power Gamma^2
    };

    struct ChannelModelConfig
    {
        RfConfig rf;
        StochasticParams stochastic;
        GroundConfig ground;
        AmplitudeMode amplitude_mode = AmplitudeMode::linear_count;

        void validate() const;
    };

    // Random quantities drawn once per cluster track and realization
    struct ClusterDraws
    {
        double virtual_delay = 0.0; // tau~ [s]
        double phi0 = 0.0;          // [rad]
        double shadowing_db = 0.0;  // Z [dB]
    };

    ClusterDraws draw_cluster(const StochasticParams &params, Rng &rng);

    // ----- per-component operations ---------------------------------------

    // Relative displacement: D(t) = D(t0) + int v_R - int v_T, trapezoidal over the trajectory samples
    Vec3 tx_rx_distance(const Trajectory &tx, const Trajectory &rx, double t0, double t);

    // 1 iff t0 <= t <= T0
    int window(double t, double t0, double T0);

    // Unit-amplitude LoS tap (doppler_integral left at 0; the simulator accumulates it)
    PathComponent los_component(const Trajectory &tx, const Trajectory &rx, const RfConfig &rf, double t,
                                double phi0 = 0.0);

    // exp(-xi tau - eta) * 10^(-Z/10), before normalization across clusters
    double cluster_power(double delay, const StochasticParams &params, double shadowing_db);
    double cluster_power(double delay, const StochasticParams &params, Rng &rng);

    // Scales so that the values sum to one (all-zero input stays zero)
    std::vector<double> normalize_powers(std::span<const double> powers);

    // Geometric delay through the cluster plus the virtual-link delay
    double nlos_delay(const Vec3 &cluster_center, const Vec3 &tx_pos, const Vec3 &rx_pos, double virtual_delay);

    PathComponent nlos_component(const clusters::Cluster &cluster, const Trajectory &tx, const Trajectory &rx,
                                 const RfConfig &rf, const ClusterDraws &draws, double normalized_power,
                                 AmplitudeMode mode, double t);

    // Specular reflection on the plane z = 0 via the image of the transmitter
    PathComponent ground_reflection(const Trajectory &tx, const Trajectory &rx, const RfConfig &rf,
                                    const GroundConfig &ground, double t, double phi0 = 0.0);

    // Applies the mixing weights; output order is LoS, GR, then the NLoS taps
    std::vector<PathComponent> compose_cir(const PathComponent &los, const PathComponent &gr,
                                           std::span<const PathComponent> nlos, const RfConfig &rf);

    // Ricean factor in effect for the given components (constant or power-budget mode)
    double effective_ricean(const PathComponent &los, const PathComponent &gr, std::span<const PathComponent> nlos,
                            const RfConfig &rf);

    // H(t, f) of one CIR snapshot; NLoS and GR taps carry the (f / f_c)^chi factor
    std::complex<double> transfer_function(std::span<const PathComponent> taps, double f, const RfConfig &rf);

    // ----- realizations ----------------------------------------------------

    struct ChannelRealization
    {
        std::vector<double> times;
        std::vector<std::vector<PathComponent>> taps; // per time; empty outside the window
        RfConfig rf;
        std::uint64_t seed = 0;

        // Index of the snapshot at time t (within 1e-9 relative), or throws DomainError
        std::size_t index_of(double t) const;
        std::complex<double> transfer(std::size_t time_index, double f) const
        {
            return transfer_function(taps[time_index], f, rf);
        }
    };

    // Time-varying channel over the snapshot grid defined by the cluster sets
    class ChannelSimulator
    {
    public:
        ChannelSimulator(Trajectory tx, Trajectory rx, std::vector<clusters::ClusterSet> sets, ChannelModelConfig cfg);

        // Deterministic in `seed`
        ChannelRealization realize(std::uint64_t seed) const;

        const std::vector<clusters::ClusterSet> &cluster_sets() const { return sets_; }
        const ChannelModelConfig &config() const { return cfg_; }

    private:
        Trajectory tx_, rx_;
        std::vector<clusters::ClusterSet> sets_;
        ChannelModelConfig cfg_;
    };

    // Snapshot grid without any clusters (LoS + GR only)
    std::vector<clusters::ClusterSet> empty_cluster_sets(const Roi &roi, double start, double dt, std::size_t n);

    // CSV: t,tap_kind,track_id,amplitude,phase,delay_s,doppler_hz,weight
    void write_cir_csv(std::ostream &os, const ChannelRealization &r);

    // Two channels (re, im) over axes (time, frequency); z has one voxel
    VoxelGrid transfer_grid(const ChannelRealization &r, std::span<const double> frequencies);
}

#endif
