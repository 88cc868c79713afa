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

#include "u2v/stats.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "u2v/parallel.hpp"
#include "u2v/rng.hpp"

namespace u2v::stats
{
    namespace
    {
        std::size_t checked_index(const channel::ChannelRealization &r, double t)
        {
            const std::size_t k = r.index_of(t);
            if (!channel::window(r.times[k], r.rf.window_start, r.rf.window_end))
                throw DomainError("time offset leaves the channel window");
            return k;
        }

        std::size_t zero_index(std::span<const double> offsets, const char *what)
        {
            for (std::size_t i = 0; i < offsets.size(); ++i)
                if (offsets[i] == 0.0)
                    return i;
            throw UsageError(std::string(what) + ": offset grid does not contain zero");
        }

        void require_power(double p)
        {
            if (!(p > 0.0))
                throw DomainError("correlation: zero channel power at the anchor; cannot normalize");
        }
    }

    CorrelationSurface tfcf(const Realizer &realizer, double t, double f, std::span<const double> time_offsets,
                            std::span<const double> frequency_offsets, const EnsembleOptions &options)
    {
        if (options.realizations == 0)
            throw UsageError("tfcf: need at least one realization");
        if (time_offsets.empty() || frequency_offsets.empty())
            throw UsageError("tfcf: empty offset grid");

        const std::size_t n_dt = time_offsets.size(), n_df = frequency_offsets.size();
        const std::size_t R = options.realizations;
        std::vector<std::vector<Complex>> per_realization(R);
        std::vector<double> anchor_power(R);

        parallel_for(R, options.jobs, [&](std::size_t r)
                     {
            const auto realization = realizer(substream_seed(options.base_seed, r));
            const std::size_t k0 = checked_index(realization, t);
            const Complex h0 = realization.transfer(k0, f);
            anchor_power[r] = std::norm(h0);

            auto &acc = per_realization[r];
            acc.resize(n_dt * n_df);
            for (std::size_t i = 0; i < n_dt; ++i)
            {
                const std::size_t k = checked_index(realization, t + time_offsets[i]);
                for (std::size_t j = 0; j < n_df; ++j)
                {
                    if (time_offsets[i] == 0.0 && frequency_offsets[j] == 0.0)
                        acc[i * n_df + j] = std::norm(h0);
                    else
                        acc[i * n_df + j] = std::conj(h0) * realization.transfer(k, f + frequency_offsets[j]);
                }
            } });

        CorrelationSurface s;
        s.anchor_time = t;
        s.anchor_frequency = f;
        s.time_offsets.assign(time_offsets.begin(), time_offsets.end());
        s.frequency_offsets.assign(frequency_offsets.begin(), frequency_offsets.end());
        s.values.assign(n_dt * n_df, Complex{});
        s.realizations = R;
        // fixed summation order keeps the result independent of the job count
        for (std::size_t r = 0; r < R; ++r)
        {
            for (std::size_t i = 0; i < s.values.size(); ++i)
                s.values[i] += per_realization[r][i];
            s.zero_offset_power += anchor_power[r];
        }
        const double inv = 1.0 / static_cast<double>(R);
        for (auto &v : s.values)
            v *= inv;
        s.zero_offset_power *= inv;
        return s;
    }

    std::vector<Complex> tacf(const CorrelationSurface &surface, bool normalized)
    {
        const std::size_t j = zero_index(surface.frequency_offsets, "tacf");
        if (normalized)
            require_power(surface.zero_offset_power);
        std::vector<Complex> out(surface.time_offsets.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = normalized ? surface.normalized(i, j) : surface.at(i, j);
        return out;
    }

    std::vector<Complex> fcf(const CorrelationSurface &surface, bool normalized)
    {
        const std::size_t i = zero_index(surface.time_offsets, "fcf");
        if (normalized)
            require_power(surface.zero_offset_power);
        std::vector<Complex> out(surface.frequency_offsets.size());
        for (std::size_t j = 0; j < out.size(); ++j)
            out[j] = normalized ? surface.normalized(i, j) : surface.at(i, j);
        return out;
    }

    std::vector<Complex> tacf(const Realizer &realizer, double t, double f, std::span<const double> time_offsets,
                              const EnsembleOptions &options, bool normalized)
    {
        const double zero[] = {0.0};
        return tacf(tfcf(realizer, t, f, time_offsets, zero, options), normalized);
    }

    std::vector<Complex> fcf(const Realizer &realizer, double t, double f, std::span<const double> frequency_offsets,
                             const EnsembleOptions &options, bool normalized)
    {
        const double zero[] = {0.0};
        return fcf(tfcf(realizer, t, f, zero, frequency_offsets, options), normalized);
    }

    std::vector<Complex> tacf_time_average(const channel::ChannelRealization &r, double t_begin, double t_end,
                                           double f, std::size_t max_lag, bool normalized)
    {
        std::vector<Complex> h(r.times.size());
        std::vector<bool> active(r.times.size());
        for (std::size_t k = 0; k < r.times.size(); ++k)
        {
            active[k] = channel::window(r.times[k], r.rf.window_start, r.rf.window_end) == 1;
            if (active[k])
                h[k] = r.transfer(k, f);
        }

        std::vector<Complex> out(max_lag + 1);
        std::size_t anchors = 0;
        double power = 0.0;
        for (std::size_t k = 0; k < r.times.size(); ++k)
        {
            if (r.times[k] < t_begin || r.times[k] > t_end)
                continue;
            if (k + max_lag >= r.times.size() || !active[k] || !active[k + max_lag])
                continue;
            ++anchors;
            power += std::norm(h[k]);
            out[0] += std::norm(h[k]);
            for (std::size_t lag = 1; lag <= max_lag; ++lag)
                out[lag] += std::conj(h[k]) * h[k + lag];
        }
        if (anchors == 0)
            throw DomainError("tacf_time_average: no anchor in the segment leaves room for the requested lags");
        for (auto &v : out)
            v /= static_cast<double>(anchors);
        if (normalized)
        {
            require_power(power);
            for (auto &v : out)
                v /= power / static_cast<double>(anchors);
        }
        return out;
    }

    std::vector<Complex> fcf_time_average(const channel::ChannelRealization &r, double t_begin, double t_end,
                                          double f, std::span<const double> frequency_offsets, bool normalized)
    {
        std::vector<Complex> out(frequency_offsets.size());
        std::size_t anchors = 0;
        double power = 0.0;
        for (std::size_t k = 0; k < r.times.size(); ++k)
        {
            if (r.times[k] < t_begin || r.times[k] > t_end ||
                !channel::window(r.times[k], r.rf.window_start, r.rf.window_end))
                continue;
            ++anchors;
            const Complex h0 = r.transfer(k, f);
            power += std::norm(h0);
            for (std::size_t j = 0; j < frequency_offsets.size(); ++j)
                out[j] += frequency_offsets[j] == 0.0 ? Complex(std::norm(h0))
                                                      : std::conj(h0) * r.transfer(k, f + frequency_offsets[j]);
        }
        if (anchors == 0)
            throw DomainError("fcf_time_average: no active snapshot in the segment");
        const double scale = normalized ? (require_power(power), power) : static_cast<double>(anchors);
        for (auto &v : out)
            v /= scale;
        return out;
    }

    std::vector<Complex> hermitian_extend(std::span<const Complex> one_sided)
    {
        if (one_sided.empty())
            return {};
        std::vector<Complex> out(one_sided.begin(), one_sided.end());
        for (std::size_t i = one_sided.size() - 1; i >= 1; --i)
            out.push_back(std::conj(one_sided[i]));
        return out;
    }

    // ----- DPSD ------------------------------------------------------------------

    std::vector<double> taper_weights(std::size_t n, Taper taper)
    {
        std::vector<double> w(n, 1.0);
        if (taper == Taper::hann)
            for (std::size_t i = 0; i < n; ++i)
            {
                const double lag = i < (n + 1) / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(n);
                w[i] = 0.5 * (1.0 + std::cos(2.0 * pi * lag / static_cast<double>(n)));
            }
        return w;
    }

    double Spectrum::peak_frequency() const
    {
        if (density.empty())
            throw UsageError("empty spectrum");
        const auto it = std::max_element(density.begin(), density.end());
        return frequencies[static_cast<std::size_t>(std::distance(density.begin(), it))];
    }

    Complex Spectrum::total_mass() const
    {
        Complex sum{};
        for (const auto &v : values)
            sum += v;
        return sum * resolution;
    }

    namespace
    {
        std::mutex fftw_planner_mutex; // planner calls are not thread-safe

        class FftPlan
        {
        public:
            FftPlan(std::vector<Complex> &in, std::vector<Complex> &out)
            {
                std::lock_guard lock(fftw_planner_mutex);
                plan_ = fftw_plan_dft_1d(static_cast<int>(in.size()), reinterpret_cast<fftw_complex *>(in.data()),
                                         reinterpret_cast<fftw_complex *>(out.data()), FFTW_FORWARD, FFTW_ESTIMATE);
                if (!plan_)
                    throw std::runtime_error("fftw: plan creation failed");
            }
            ~FftPlan()
            {
                std::lock_guard lock(fftw_planner_mutex);
                fftw_destroy_plan(plan_);
            }
            FftPlan(const FftPlan &) = delete;
            FftPlan &operator=(const FftPlan &) = delete;

            void execute() { fftw_execute(plan_); }

        private:
            fftw_plan plan_ = nullptr;
        };
    }

    Spectrum dpsd(std::span<const Complex> tacf_samples, double dt, Taper taper)
    {
        const std::size_t n = tacf_samples.size();
        if (n == 0)
            throw UsageError("dpsd: empty TACF sequence");
        if (!(dt > 0.0))
            throw DomainError("dpsd: sample interval must be positive");

        const auto w = taper_weights(n, taper);
        std::vector<Complex> in(n), out(n);
        for (std::size_t i = 0; i < n; ++i)
            in[i] = tacf_samples[i] * w[i];
        FftPlan plan(in, out);
        plan.execute();

        Spectrum s;
        s.resolution = 1.0 / (static_cast<double>(n) * dt);
        s.frequencies.resize(n);
        s.values.resize(n);
        s.density.resize(n);
        const std::size_t half = n / 2;
        for (std::size_t m = 0; m < n; ++m)
        {
            const std::size_t k = (m + n - half) % n;
            s.frequencies[m] = (static_cast<double>(m) - static_cast<double>(half)) * s.resolution;
            s.values[m] = out[k] * dt;
            s.density[m] = std::abs(s.values[m]);
        }
        return s;
    }
}
