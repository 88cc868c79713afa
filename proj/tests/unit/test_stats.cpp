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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "u2v/errors.hpp"
#include "u2v/rng.hpp"
#include "u2v/stats.hpp"

using namespace u2v;
using namespace u2v::stats;
using Catch::Approx;
using fixtures::cluster_at;
using fixtures::constant_velocity;
using fixtures::stationary;

namespace
{
    const Roi scene_roi({-100.0, -100.0, 0.0}, {100.0, 100.0, 40.0}, {40, 40, 20});

    std::vector<Complex> random_sequence(std::mt19937_64 &rng, std::size_t n)
    {
        std::normal_distribution<double> g;
        std::vector<Complex> x(n);
        for (auto &v : x)
            v = {g(rng), g(rng)};
        return x;
    }

    double max_abs(const std::vector<Complex> &v)
    {
        double m = 0.0;
        for (const auto &x : v)
            m = std::max(m, std::abs(x));
        return m;
    }

    // Two equal-power taps whose relative phase alternates by pi between consecutive realizations,
    // so cross terms cancel exactly over an even ensemble.
    Realizer two_tap_realizer(double dtau, std::uint64_t base_seed, std::size_t r_count)
    {
        std::map<std::uint64_t, std::size_t> index;
        for (std::size_t r = 0; r < r_count; ++r)
            index[substream_seed(base_seed, r)] = r;
        return [=](std::uint64_t seed)
        {
            const std::size_t r = index.at(seed);
            Rng rng(seed);
            const double phi = std::uniform_real_distribution<double>(0.0, 2.0 * pi)(rng);
            channel::ChannelRealization out;
            out.times = {0.0};
            out.rf.window_start = 0.0;
            out.rf.window_end = 1.0;
            channel::PathComponent a, b;
            a.kind = b.kind = channel::PathKind::nlos;
            a.amplitude = b.amplitude = 1.0;
            a.delay = 100e-9;
            b.delay = 100e-9 + dtau;
            a.phase = phi;
            b.phase = phi + (r % 2 == 0 ? 0.0 : pi);
            out.taps = {{a, b}};
            return out;
        };
    }

    channel::ChannelSimulator los_only(double speed, double dt, std::size_t n)
    {
        const auto tx = stationary({0.0, 0.0, 30.0}, 0.0, dt, n);
        const auto rx = constant_velocity({100.0, 0.0, 30.0}, {speed, 0.0, 0.0}, 0.0, dt, n);
        channel::ChannelModelConfig cfg;
        cfg.rf.window_start = 0.0;
        cfg.rf.window_end = dt * static_cast<double>(n);
        cfg.ground.reflection_coefficient = 0.0;
        cfg.rf.ricean.reset();
        return channel::ChannelSimulator(tx, rx, channel::empty_cluster_sets(scene_roi, 0.0, dt, n), cfg);
    }

    channel::ChannelSimulator static_multipath(double dt, std::size_t n)
    {
        const auto tx = stationary({-30.0, 20.0, 60.0}, 0.0, dt, n);
        const auto rx = stationary({10.0, -3.5, 1.8}, 0.0, dt, n);
        auto sets = channel::empty_cluster_sets(scene_roi, 0.0, dt, n);
        for (auto &s : sets)
            s.clusters = {cluster_at({20.0, 20.0, 10.0}, 2, 0), cluster_at({-40.0, 0.0, 5.0}, 1, 1),
                          cluster_at({0.0, -50.0, 15.0}, 3, 2)};
        channel::ChannelModelConfig cfg;
        cfg.rf.window_start = 0.0;
        cfg.rf.window_end = dt * static_cast<double>(n);
        return channel::ChannelSimulator(tx, rx, sets, cfg);
    }

    std::vector<double> lags(std::size_t n, double dt)
    {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = static_cast<double>(i) * dt;
        return v;
    }
}

TEST_CASE("FFT DPSD matches the direct DFT oracle")
{
    std::mt19937_64 rng(256);
    for (std::size_t n : {1u, 2u, 3u, 7u, 64u, 255u, 256u, 1000u, 4096u})
    {
        const auto x = random_sequence(rng, n);
        const auto fast = dpsd(x, 0.01);
        const auto ref = oracle::dpsd_oracle(x, 0.01);
        std::vector<Complex> diff(n);
        for (std::size_t m = 0; m < n; ++m)
        {
            REQUIRE(fast.frequencies[m] == Approx(ref.frequencies[m]).margin(1e-9));
            diff[m] = fast.values[m] - ref.values[m];
        }
        REQUIRE(max_abs(diff) / max_abs(ref.values) < 1e-9);
    }
}

TEST_CASE("DPSD edge cases and conventions")
{
    const std::vector<Complex> one{{2.0, -1.0}};
    const auto s = dpsd(one, 0.5);
    REQUIRE(s.values.size() == 1);
    CHECK(s.frequencies[0] == 0.0);
    CHECK(s.values[0] == Complex(2.0, -1.0) * 0.5);
    CHECK(s.total_mass() == Complex(2.0, -1.0));
    CHECK_THROWS_AS(dpsd(std::vector<Complex>{}, 0.5), UsageError);
    CHECK_THROWS_AS(dpsd(one, 0.0), DomainError);

    const std::vector<Complex> ones(1000, 1.0);
    CHECK(dpsd(ones, 0.01).resolution == Approx(0.1).epsilon(1e-15));

    std::mt19937_64 rng(3);
    const auto a = random_sequence(rng, 100), b = random_sequence(rng, 100);
    std::vector<Complex> ab(100);
    for (std::size_t i = 0; i < 100; ++i)
        ab[i] = a[i] + b[i];
    const auto sa = dpsd(a, 0.01), sb = dpsd(b, 0.01), sab = dpsd(ab, 0.01);
    for (std::size_t m = 0; m < 100; ++m)
        REQUIRE(std::abs(sab.values[m] - (sa.values[m] + sb.values[m])) < 1e-12);
}

TEST_CASE("Parseval mass and symmetry of a real even TACF")
{
    std::vector<Complex> one_sided(200);
    for (std::size_t i = 0; i < one_sided.size(); ++i)
        one_sided[i] = std::exp(-0.02 * static_cast<double>(i)) * std::cos(0.3 * static_cast<double>(i));
    const auto two = hermitian_extend(one_sided);
    CHECK(two.size() == 399);
    const auto s = dpsd(two, 0.01);
    CHECK(std::abs(s.total_mass() - one_sided[0]) <= 1e-6 * std::abs(one_sided[0]));
    for (std::size_t m = 0; m < s.values.size(); ++m)
        CHECK(std::abs(s.values[m].imag()) < 1e-12);
    // frequencies are symmetric for odd N
    for (std::size_t m = 0; m < s.values.size(); ++m)
        CHECK(s.values[m].real() == Approx(s.values[s.values.size() - 1 - m].real()).margin(1e-12));
}

TEST_CASE("Hann taper is lag-centred")
{
    const auto w = taper_weights(8, Taper::hann);
    CHECK(w[0] == 1.0);
    CHECK(w[4] == Approx(0.0).margin(1e-15));
    CHECK(w[1] == Approx(w[7]));
    CHECK(w[3] == Approx(w[5]));
    const auto r = taper_weights(8, Taper::rectangular);
    CHECK(std::ranges::all_of(r, [](double v) { return v == 1.0; }));
}

TEST_CASE("LoS-only TACF is a unit phasor")
{
    const double dt = 0.01;
    const auto sim = los_only(10.0, dt, 60);
    const Realizer realizer = [&](std::uint64_t s) { return sim.realize(s); };
    const auto d = lags(40, dt);
    const EnsembleOptions opt{20, 5, 1};
    const auto t_acf = tacf(realizer, 0.1, 28e9, d, opt);
    CHECK(t_acf[0] == Complex(1.0, 0.0));
    for (const auto &v : t_acf)
        CHECK(std::abs(v) == Approx(1.0).margin(1e-9));

    const double fd = oracle::doppler(10.0, 28e9);
    for (std::size_t i = 0; i < d.size(); ++i)
    {
        // E[H*(t) H(t + dt)] rotates by +2 pi f_D dt
        const auto expect = std::polar(1.0, 2.0 * oracle::pi * fd * d[i]);
        CHECK(std::abs(t_acf[i] - expect) < 1e-6);
    }

    const auto ta = tacf_time_average(sim.realize(1), 0.0, 0.59, 28e9, 20);
    for (const auto &v : ta)
        CHECK(std::abs(v) == Approx(1.0).margin(1e-9));
}

TEST_CASE("static scene: TACF is real, constant and Hermitian; DPSD peaks at 0 Hz")
{
    const double dt = 0.01;
    const auto sim = static_multipath(dt, 41);
    const Realizer realizer = [&](std::uint64_t s) { return sim.realize(s); };
    std::vector<double> offsets;
    for (int k = -10; k <= 10; ++k)
        offsets.push_back(k * dt);
    const EnsembleOptions opt{10, 0, 2};
    const auto surface = tfcf(realizer, 0.2, 28e9, offsets, std::vector<double>{0.0}, opt);
    for (std::size_t i = 0; i < offsets.size(); ++i)
    {
        const auto v = surface.normalized(i, 0);
        CHECK(v.real() == Approx(1.0).margin(1e-9));
        CHECK(v.imag() == Approx(0.0).margin(1e-9));
        const auto mirror = surface.normalized(offsets.size() - 1 - i, 0);
        CHECK(std::abs(v - std::conj(mirror)) < 1e-9);
    }
    const auto one_sided = tacf(realizer, 0.0, 28e9, lags(30, dt), opt);
    const auto s = dpsd(hermitian_extend(one_sided), dt);
    CHECK(s.peak_frequency() == 0.0);
}

TEST_CASE("zero-offset correlation is the mean power")
{
    const auto sim = static_multipath(0.01, 5);
    const Realizer realizer = [&](std::uint64_t s) { return sim.realize(s); };
    const EnsembleOptions opt{16, 9, 1};
    const auto surface = tfcf(realizer, 0.01, 28e9, std::vector<double>{0.0}, std::vector<double>{0.0}, opt);
    double mean = 0.0;
    for (std::size_t r = 0; r < opt.realizations; ++r)
        mean += std::norm(sim.realize(substream_seed(opt.base_seed, r)).transfer(1, 28e9));
    mean /= static_cast<double>(opt.realizations);
    CHECK(surface.at(0, 0).imag() == 0.0);
    CHECK(surface.at(0, 0).real() == Approx(mean).epsilon(1e-12));
    CHECK(surface.normalized(0, 0) == Complex(1.0, 0.0));
}

TEST_CASE("ensemble reduction does not depend on the job count")
{
    const auto sim = static_multipath(0.01, 20);
    const Realizer realizer = [&](std::uint64_t s) { return sim.realize(s); };
    const auto d = lags(10, 0.01);
    const std::vector<double> df{0.0, 1e6, 2e6};
    const auto a = tfcf(realizer, 0.0, 28e9, d, df, {12, 4, 1});
    const auto b = tfcf(realizer, 0.0, 28e9, d, df, {12, 4, 5});
    CHECK(a.values == b.values);
    CHECK(a.zero_offset_power == b.zero_offset_power);
}

TEST_CASE("FCF of one and two taps")
{
    const std::size_t r_count = 20;
    const std::vector<double> df = [] {
        std::vector<double> v;
        for (int i = 0; i <= 40; ++i)
            v.push_back(i * 0.5e6);
        return v;
    }();

    const auto single = [](std::uint64_t seed)
    {
        channel::ChannelRealization out;
        out.times = {0.0};
        channel::PathComponent a;
        a.kind = channel::PathKind::nlos;
        a.amplitude = 1.0;
        a.delay = 2e-7;
        a.phase = static_cast<double>(seed % 1000) * 1e-3;
        out.taps = {{a}};
        return out;
    };
    for (const auto &v : fcf(single, 0.0, 28e9, df, {r_count, 0, 1}))
        CHECK(std::abs(v) == Approx(1.0).margin(1e-9));

    const double dtau = 50e-9;
    const auto two = fcf(two_tap_realizer(dtau, 0, r_count), 0.0, 28e9, df, {r_count, 0, 1});
    CHECK(two[0] == Complex(1.0, 0.0));
    for (std::size_t i = 0; i < df.size(); ++i)
        CHECK(std::abs(two[i]) == Approx(oracle::two_path_fcf(df[i], dtau)).margin(1e-9));
}

TEST_CASE("offset validation")
{
    const auto sim = static_multipath(0.01, 5);
    const Realizer realizer = [&](std::uint64_t s) { return sim.realize(s); };
    CHECK_THROWS_AS(tacf(realizer, 0.0, 28e9, std::vector<double>{0.0, 0.005}, {2, 0, 1}), DomainError);
    CHECK_THROWS_AS(tacf(realizer, 0.0, 28e9, std::vector<double>{0.0, 0.5}, {2, 0, 1}), DomainError);
}

TEST_CASE("Monte-Carlo bounds and standard error scaling")
{
    // moving scatterers with random frozen phases: a genuinely stochastic TACF
    const double dt = 0.01;
    const std::size_t n = 12;
    const auto tx = stationary({-30.0, 20.0, 60.0}, 0.0, dt, n);
    const auto rx = constant_velocity({0.0, -3.5, 1.8}, {12.0, 0.0, 0.0}, 0.0, dt, n);
    auto sets = channel::empty_cluster_sets(scene_roi, 0.0, dt, n);
    for (auto &s : sets)
        for (int l = 0; l < 6; ++l)
        {
            auto c = cluster_at({-50.0 + 20.0 * l, 15.0 - 7.0 * l, 1.5}, 1, l, clusters::ClusterKind::dynamic);
            c.velocity = {l % 2 ? 14.0 : -9.0, 0.0, 0.0};
            s.clusters.push_back(c);
        }
    channel::ChannelModelConfig cfg;
    cfg.rf.window_start = 0.0;
    cfg.rf.window_end = 1.0;
    cfg.rf.ricean = 0.2;
    const channel::ChannelSimulator sim(tx, rx, sets, cfg);
    const Realizer realizer = [&](std::uint64_t s) { return sim.realize(s); };
    const std::vector<double> offsets{0.0, 5 * dt};

    auto spread = [&](std::size_t r_count)
    {
        std::vector<double> est;
        for (std::uint64_t rep = 0; rep < 100; ++rep)
        {
            const auto t = tacf(realizer, 0.0, 28e9, offsets, {r_count, 1000 + rep * 7919, 4});
            REQUIRE(std::abs(t[1]) <= 1.0 + 3.0 / std::sqrt(static_cast<double>(r_count)));
            est.push_back(t[1].real());
        }
        double m = 0.0, v = 0.0;
        for (double e : est)
            m += e;
        m /= static_cast<double>(est.size());
        for (double e : est)
            v += (e - m) * (e - m);
        return std::sqrt(v / static_cast<double>(est.size() - 1));
    };
    const double ratio = spread(40) / spread(20);
    CHECK(ratio == Approx(1.0 / std::sqrt(2.0)).margin(0.2));
}
