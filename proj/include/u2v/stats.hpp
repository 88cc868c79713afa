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

#ifndef U2V_STATS_HPP
#define U2V_STATS_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "u2v/channel.hpp"

namespace u2v::stats
{
    using Complex = std::complex<double>;

    // Produces one independent channel realization per seed
    using Realizer = std::function<channel::ChannelRealization(std::uint64_t seed)>;

    struct EnsembleOptions
    {
        std::size_t realizations = 50; // R
        std::uint64_t base_seed = 0;   // realization r uses substream (base_seed, r)
        std::size_t jobs = 1;
    };

    // Monte-Carlo estimate of E[H*(t, f) H(t + dt, f + df)] over a grid of offsets
    struct CorrelationSurface
    {
        double anchor_time = 0.0;
        double anchor_frequency = 0.0;
        std::vector<double> time_offsets;      // [s]
        std::vector<double> frequency_offsets; // [Hz]
        std::vector<Complex> values;           // [i_dt * n_df + i_df]
        double zero_offset_power = 0.0;        // mean |H(t, f)|^2
        std::size_t realizations = 0;

        Complex at(std::size_t i_dt, std::size_t i_df) const { return values[i_dt * frequency_offsets.size() + i_df]; }
        // Value divided by the zero-offset power
        Complex normalized(std::size_t i_dt, std::size_t i_df) const { return at(i_dt, i_df) / zero_offset_power; }
    };

    CorrelationSurface tfcf(const Realizer &realizer, double t, double f, std::span<const double> time_offsets,
                            std::span<const double> frequency_offsets, const EnsembleOptions &options);

    // Correlation restricted to df = 0 / dt = 0
    std::vector<Complex> tacf(const CorrelationSurface &surface, bool normalized = true);
    std::vector<Complex> fcf(const CorrelationSurface &surface, bool normalized = true);

    std::vector<Complex> tacf(const Realizer &realizer, double t, double f, std::span<const double> time_offsets,
                              const EnsembleOptions &options, bool normalized = true);
    std::vector<Complex> fcf(const Realizer &realizer, double t, double f, std::span<const double> frequency_offsets,
                             const EnsembleOptions &options, bool normalized = true);

    // Sliding-time estimator on one realization: mean over anchors t_k in [t_begin, t_end] of
    // H*(t_k, f) H(t_k + lag * dt, f), for lag = 0 .. max_lag
    std::vector<Complex> tacf_time_average(const channel::ChannelRealization &r, double t_begin, double t_end,
                                           double f, std::size_t max_lag, bool normalized = true);
    // Mean over anchors in [t_begin, t_end] of H*(t_k, f) H(t_k, f + df)
    std::vector<Complex> fcf_time_average(const channel::ChannelRealization &r, double t_begin, double t_end,
                                          double f, std::span<const double> frequency_offsets, bool normalized = true);

    // Builds the circular two-sided sequence [r0, r1 .. r_{M-1}, conj(r_{M-1}) .. conj(r1)]
    std::vector<Complex> hermitian_extend(std::span<const Complex> one_sided);

    enum class Taper
    {
        rectangular,
        hann
    };

    // Doppler spectrum. values[k] = dt * sum_n w_n x_n exp(-j 2 pi f_k n dt); the grid is
    // fft-shifted (ascending, f = (k - N/2) / (N dt)). density = |values|.
    struct Spectrum
    {
        std::vector<double> frequencies;
        std::vector<Complex> values;
        std::vector<double> density;
        double resolution = 0.0;

        double peak_frequency() const;
        // sum(values) * resolution; equals x_0 w_0 for any input
        Complex total_mass() const;
    };

    // FFT path; N >= 1 samples, uniformly spaced by dt
    Spectrum dpsd(std::span<const Complex> tacf_samples, double dt, Taper taper = Taper::rectangular);

    // Lag-centred window weights applied by dpsd (w_0 = 1)
    std::vector<double> taper_weights(std::size_t n, Taper taper);
}

#endif
