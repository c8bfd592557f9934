// SPDX-License-Identifier: Apache-2.0
//
// csivis - angular-delay CSI imaging and channel estimation workbench
// Copyright (C) 2026 The csivis authors
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

#include "csivis/channel.hpp"
#include "csivis/seeding.hpp"
#include "csivis/estimation.hpp"

#include <cmath>
#include <numbers>

using namespace csivis;
using Catch::Matchers::WithinAbs;

namespace
{
    // Direct evaluation of the channel model, entry by entry.
    cdouble direct_entry(const std::vector<PathTriplet> &paths, int m, int n)
    {
        cdouble acc = 0.0;
        for (const auto &p : paths)
            acc += p.gain * std::polar(1.0, -2.0 * std::numbers::pi * (m * p.angle - n * p.delay));
        return acc;
    }
}

TEST_CASE("steering_vector - closed-form examples")
{
    const auto a0 = steering_vector(0.0, 4);
    for (int k = 0; k < 4; ++k)
        CHECK(a0[k] == cdouble(1.0, 0.0));

    const auto a_half = steering_vector(0.5, 4);
    const double expected_half[] = {1.0, -1.0, 1.0, -1.0};
    for (int k = 0; k < 4; ++k)
    {
        CHECK_THAT(a_half[k].real(), WithinAbs(expected_half[k], 1e-15));
        CHECK_THAT(a_half[k].imag(), WithinAbs(0.0, 1e-15));
    }

    const auto a_quarter = steering_vector(0.25, 4);
    const cdouble expected_quarter[] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    for (int k = 0; k < 4; ++k)
        CHECK(std::abs(a_quarter[k] - expected_quarter[k]) < 1e-15);

    CHECK_THROWS_AS(steering_vector(1.0, 4), DomainError);
    CHECK_THROWS_AS(steering_vector(-0.1, 4), DomainError);
}

TEST_CASE("delay_vector - closed-form examples")
{
    const auto b0 = delay_vector(0.0, 3);
    CHECK(b0.size() == 3);
    for (int k = 0; k < 3; ++k)
        CHECK(b0[k] == cdouble(1.0, 0.0));

    const auto b = delay_vector(0.25, 4);
    const cdouble expected[] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    for (int k = 0; k < 4; ++k)
        CHECK(std::abs(b[k] - expected[k]) < 1e-15);

    const auto b2 = delay_vector(0.5, 2);
    CHECK(std::abs(b2[1] - cdouble(-1.0, 0.0)) < 1e-15);

    CHECK_THROWS_AS(delay_vector(1.5, 4), DomainError);
}

TEST_CASE("steering and delay vectors have unit modulus and exact first element")
{
    Rng rng = make_rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial)
    {
        const auto a = steering_vector(u(rng), 37);
        const auto b = delay_vector(u(rng), 29);
        CHECK(a[0] == cdouble(1.0, 0.0));
        CHECK(b[0] == cdouble(1.0, 0.0));
        CHECK((a.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-14);
        CHECK((b.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("synth_channel - trivial examples")
{
    const auto ones = synth_channel({PathTriplet{{1.0, 0.0}, 0.0, 0.0}}, 3, 2);
    CHECK(ones.num_antennas() == 3);
    CHECK(ones.num_subcarriers() == 2);
    CHECK((ones.entries().array() - cdouble(1.0, 0.0)).abs().maxCoeff() == 0.0);

    const auto scaled = synth_channel({PathTriplet{{0.0, 2.0}, 0.0, 0.0}}, 2, 2);
    CHECK((scaled.entries().array() - cdouble(0.0, 2.0)).abs().maxCoeff() == 0.0);

    const auto cancel = synth_channel({PathTriplet{{1.0, 0.0}, 0.0, 0.0}, PathTriplet{{-1.0, 0.0}, 0.0, 0.0}}, 4, 4);
    CHECK(cancel.entries().cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(synth_channel({}, 4, 4), DomainError);
    CHECK_THROWS_AS(synth_channel({PathTriplet{{1.0, 0.0}, 1.0, 0.0}}, 4, 4), DomainError);
}

TEST_CASE("synth_channel matches the direct formula and is linear in the gains")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        PathSampling cfg;
        cfg.num_paths = 5;
        cfg.num_antennas = 9;
        cfg.num_subcarriers = 7;
        const auto paths = sample_paths(cfg, seed);
        const auto h = synth_channel(paths, 9, 7);
        for (int m = 0; m < 9; ++m)
            for (int n = 0; n < 7; ++n)
            {
                const cdouble ref = direct_entry(paths, m, n);
                CHECK(std::abs(h.entries()(m, n) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
            }

        const cdouble scale(0.3, -1.7);
        auto scaled_path = paths.front();
        scaled_path.gain *= scale;
        const Eigen::MatrixXcd lhs = synth_channel({scaled_path}, 9, 7).entries();
        const Eigen::MatrixXcd rhs = scale * synth_channel({paths.front()}, 9, 7).entries();
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("sample_paths - determinism, grid snapping, validation")
{
    PathSampling cfg;
    cfg.num_paths = 2;
    const auto a = sample_paths(cfg, 7);
    const auto b = sample_paths(cfg, 7);
    REQUIRE(a.size() == 2);
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        CHECK(a[i].gain == b[i].gain);
        CHECK(a[i].angle == b[i].angle);
        CHECK(a[i].delay == b[i].delay);
    }

    PathSampling grid;
    grid.num_paths = 1;
    grid.num_antennas = 64;
    grid.num_subcarriers = 64;
    grid.on_grid = true;
    grid.grid_beta = 4;
    grid.grid_gamma = 4;
    for (std::uint64_t seed = 0; seed < 100; ++seed)
    {
        const auto p = sample_paths(grid, seed).front();
        const double k = p.angle * 256.0;
        CHECK(k == std::round(k));
        CHECK(p.angle < 1.0);
        CHECK(p.delay * 256.0 == std::round(p.delay * 256.0));
    }

    cfg.num_paths = 0;
    CHECK_THROWS_AS(sample_paths(cfg, 1), DomainError);
}

TEST_CASE("sample_paths - unit average channel power (Monte Carlo)")
{
    PathSampling cfg;
    cfg.num_paths = 10;
    cfg.num_antennas = 16;
    cfg.num_subcarriers = 16;
    double acc = 0.0;
    const int draws = 10000;
    for (int s = 0; s < draws; ++s)
    {
        const auto h = synth_channel(sample_paths(cfg, static_cast<std::uint64_t>(s)), 16, 16);
        acc += h.entries().squaredNorm() / 256.0;
    }
    CHECK_THAT(acc / draws, WithinAbs(1.0, 0.05));

    // Each gain keeps variance 1/L.
    double first_gain_power = 0.0;
    for (int s = 0; s < draws; ++s)
        first_gain_power += std::norm(sample_paths(cfg, static_cast<std::uint64_t>(s)).front().gain);
    CHECK_THAT(first_gain_power / draws, WithinAbs(0.1, 0.005));
}

TEST_CASE("add_pilot_noise - noiseless limit, determinism, noise variance")
{
    const auto h = synth_channel(sample_paths(PathSampling{}, 3), 64, 64);

    const auto clean = add_pilot_noise(h, std::numeric_limits<double>::infinity(), 2.0, 5);
    CHECK(clean.noise_variance() == 0.0);
    CHECK((clean.entries() - std::sqrt(2.0) * h.entries()).cwiseAbs().maxCoeff() == 0.0);

    const auto y1 = add_pilot_noise(h, 3.0, 1.0, 9);
    const auto y2 = add_pilot_noise(h, 3.0, 1.0, 9);
    CHECK((y1.entries() - y2.entries()).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THAT(y1.noise_variance(), WithinAbs(std::pow(10.0, -0.3), 1e-15));

    const auto y0 = add_pilot_noise(h, 0.0, 1.0, 21);
    const double sample_var = (y0.entries() - h.entries()).squaredNorm() / (64.0 * 64.0);
    CHECK_THAT(sample_var, WithinAbs(1.0, 0.1));

    CHECK_THROWS_AS(add_pilot_noise(h, 0.0, 0.0, 1), DomainError);
    CHECK_THROWS_AS(add_pilot_noise(h, 0.0, -1.0, 1), DomainError);
}

TEST_CASE("trivial estimator NMSE follows the SNR law")
{
    PathSampling cfg;
    cfg.num_paths = 10;
    cfg.num_antennas = 16;
    cfg.num_subcarriers = 16;
    for (const double snr : {0.0, 10.0})
    {
        double acc = 0.0;
        const int trials = 1000;
        for (int t = 0; t < trials; ++t)
        {
            const auto seed = static_cast<std::uint64_t>(t);
            const auto h = synth_channel(sample_paths(cfg, substream(seed, stream::paths)), 16, 16);
            const auto y = add_pilot_noise(h, snr, 1.0, substream(seed, stream::noise));
            acc += nmse(h, ls_estimate(y)).linear;
        }
        const double expected = std::pow(10.0, -snr / 10.0);
        CHECK(std::abs(acc / trials - expected) <= 0.05 * expected);
    }
}
