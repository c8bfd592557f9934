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
#include "csivis/estimation.hpp"
#include "csivis/seeding.hpp"

#include <cmath>

using namespace csivis;
using Catch::Matchers::WithinAbs;

namespace
{
    std::vector<DetectedPath> as_detected(const std::vector<PathTriplet> &paths)
    {
        std::vector<DetectedPath> out;
        for (const auto &p : paths)
            out.push_back({p.angle, p.delay});
        return out;
    }

    PilotObservation noiseless(const ChannelMatrix &h)
    {
        return add_pilot_noise(h, std::numeric_limits<double>::infinity(), 1.0, 0);
    }
}

TEST_CASE("ls_gains - exact recovery examples")
{
    const PathTriplet p{{0.3, -1.2}, 0.123, 0.456};
    const auto h = synth_channel({p}, 8, 8);
    const auto fit = ls_gains(noiseless(h), as_detected({p}));
    REQUIRE(fit.gains.size() == 1);
    CHECK(std::abs(fit.gains[0] - p.gain) < 1e-10);
    CHECK(fit.residual_energy < 1e-20);

    const PathTriplet a{{1.0, 0.0}, 2.0 / 16.0, 3.0 / 16.0};
    const PathTriplet b{{0.0, 2.0}, 9.0 / 16.0, 11.0 / 16.0};
    const auto h2 = synth_channel({a, b}, 16, 16);
    const auto fit2 = ls_gains(add_pilot_noise(h2, std::numeric_limits<double>::infinity(), 4.0, 0), as_detected({a, b}));
    CHECK(std::abs(fit2.gains[0] - cdouble(1.0, 0.0)) < 1e-10);
    CHECK(std::abs(fit2.gains[1] - cdouble(0.0, 2.0)) < 1e-10);

    try
    {
        ls_gains(noiseless(h), {DetectedPath{0.1, 0.2}, DetectedPath{0.4, 0.4}, DetectedPath{0.1, 0.2}});
        FAIL("expected DegenerateDictionaryError");
    }
    catch (const DegenerateDictionaryError &e)
    {
        CHECK(e.first() == 0);
        CHECK(e.second() == 2);
    }

    CHECK_THROWS_AS(ls_gains(noiseless(h), {}), DomainError);
}

TEST_CASE("ls_gains - residual bounded by observation energy and non-increasing in nested models")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed)
    {
        PathSampling cfg{6, 12, 10};
        const auto paths = sample_paths(cfg, seed);
        const auto y = add_pilot_noise(synth_channel(paths, 12, 10), 5.0, 2.0, seed + 1);
        const double energy = y.entries().squaredNorm() / 2.0;
        double previous = energy;
        std::vector<DetectedPath> nested;
        for (const auto &p : paths)
        {
            nested.push_back({p.angle, p.delay});
            const auto fit = ls_gains(y, nested);
            CHECK(fit.residual_energy <= energy * (1.0 + 1e-12));
            CHECK(fit.residual_energy <= previous * (1.0 + 1e-12));
            previous = fit.residual_energy;
        }
    }
}

TEST_CASE("reconstruct - equals synth_channel, zero gains, length mismatch")
{
    const auto paths = sample_paths(PathSampling{5, 10, 9}, 4);
    Eigen::VectorXcd gains(5);
    for (int i = 0; i < 5; ++i)
        gains[i] = paths[i].gain;
    const auto rec = reconstruct(as_detected(paths), gains, 10, 9);
    const auto syn = synth_channel(paths, 10, 9);
    CHECK((rec.entries() - syn.entries()).cwiseAbs().maxCoeff() <= 1e-15);

    const auto zero = reconstruct(as_detected(paths), Eigen::VectorXcd::Zero(5), 10, 9);
    CHECK(zero.entries().cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(reconstruct(as_detected(paths), Eigen::VectorXcd::Zero(4), 10, 9), DomainError);
}

TEST_CASE("noiseless on-grid pipeline recovers the channel")
{
    const int m = 32, n = 32, beta = 4, gamma = 4;
    const PathTriplet a{std::polar(0.7, 0.4), 17.0 / 128.0, 40.0 / 128.0};
    const PathTriplet b{std::polar(0.7, 2.9), 90.0 / 128.0, 100.0 / 128.0};
    const auto h = synth_channel({a, b}, m, n);
    auto cfg = PeakDetectorConfig::for_oversampling(beta, gamma);
    cfg.known_count = 2;
    const auto est = detect_and_fit(noiseless(h), beta, gamma, cfg);
    CHECK(est.paths.size() == 2);
    CHECK(nmse(h, est.channel).db <= -80.0);
}

TEST_CASE("ls_estimate - noiseless exactness and the SNR law")
{
    const auto h = synth_channel(sample_paths(PathSampling{}, 1), 64, 64);
    const auto y = add_pilot_noise(h, std::numeric_limits<double>::infinity(), 3.0, 0);
    CHECK((ls_estimate(y).entries() - h.entries()).cwiseAbs().maxCoeff() < 1e-14);

    PathSampling cfg{10, 16, 16};
    for (const double snr : {0.0, 10.0})
    {
        double acc = 0.0;
        for (int t = 0; t < 1000; ++t)
        {
            const auto seed = trial_seed(77, static_cast<std::uint64_t>(t));
            const auto ht = synth_channel(sample_paths(cfg, substream(seed, stream::paths)), 16, 16);
            acc += nmse(ht, ls_estimate(add_pilot_noise(ht, snr, 1.0, substream(seed, stream::noise)))).linear;
        }
        CHECK_THAT(10.0 * std::log10(acc / 1000.0), WithinAbs(-snr, 0.3));
    }
}

TEST_CASE("estimate_covariance - rank one, law of large numbers, validation")
{
    Eigen::VectorXcd u(3);
    u << cdouble(1, 0), cdouble(0, 2), cdouble(-1, 1);
    Eigen::MatrixXcd col_block(3, 4);
    for (int c = 0; c < 4; ++c)
        col_block.col(c) = u;
    const auto r = estimate_covariance({ChannelMatrix(col_block), ChannelMatrix(col_block)});
    CHECK((r.antenna_cov() - u * u.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.sample_count() == 2);

    Rng rng = make_rng(8);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    std::vector<ChannelMatrix> iid;
    for (int s = 0; s < 400; ++s)
    {
        Eigen::MatrixXcd e(4, 8);
        for (Eigen::Index i = 0; i < e.size(); ++i)
        {
            const double re = g(rng);
            const double im = g(rng);
            e.data()[i] = cdouble(re, im);
        }
        iid.emplace_back(e);
    }
    const auto ri = estimate_covariance(iid).antenna_cov();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
        {
            if (i == j)
                CHECK(std::abs(ri(i, j) - 1.0) < 0.1);
            else
                CHECK(std::abs(ri(i, j)) <= 0.1);
        }

    CHECK_THROWS_AS(estimate_covariance({ChannelMatrix(col_block)}), DomainError);
    CHECK_THROWS_AS(estimate_covariance({ChannelMatrix(col_block), ChannelMatrix(Eigen::MatrixXcd::Ones(2, 4))}), DomainError);

    Eigen::MatrixXcd not_hermitian = Eigen::MatrixXcd::Identity(2, 2);
    not_hermitian(0, 1) = cdouble(0.5, 0.0);
    CHECK_THROWS_AS(CovarianceModel(not_hermitian, 2), DomainError);
    Eigen::MatrixXcd indefinite = Eigen::MatrixXcd::Identity(2, 2);
    indefinite(1, 1) = -1.0;
    CHECK_THROWS_AS(CovarianceModel(indefinite, 2), DomainError);
}

TEST_CASE("lmmse_estimate - shrinkage examples and limits")
{
    const CovarianceModel eye(Eigen::MatrixXcd::Identity(4, 4), 2);
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Random(4, 5);
    const PilotObservation obs(y, 1.0, 1.0, 0.0);
    CHECK((lmmse_estimate(obs, eye).entries() - y / 2.0).cwiseAbs().maxCoeff() < 1e-14);

    const PilotObservation clean(y, 1.0, 0.0, std::numeric_limits<double>::infinity());
    CHECK((lmmse_estimate(clean, eye).entries() - y).cwiseAbs().maxCoeff() < 1e-14);

    const PilotObservation tiny(y, 1.0, 1e-12, 120.0);
    CHECK((lmmse_estimate(tiny, eye).entries() - y).cwiseAbs().maxCoeff() < 1e-10);

    const auto h = synth_channel(sample_paths(PathSampling{4, 8, 8}, 3), 8, 8);
    const auto yh = add_pilot_noise(h, 5.0, 1.0, 4);
    const CovarianceModel big(Eigen::MatrixXcd(1e6 * Eigen::MatrixXcd::Identity(8, 8)), 2);
    CHECK(std::abs(nmse(h, lmmse_estimate(yh, big)).linear - nmse(h, ls_estimate(yh)).linear) <= 1e-3);

    CHECK_THROWS_AS(lmmse_estimate(obs, CovarianceModel(Eigen::MatrixXcd::Identity(3, 3), 2)), DomainError);
}

TEST_CASE("lmmse dominates ls under matched covariance")
{
    const int m = 16, n = 16;
    PathSampling cfg{10, m, n};
    std::vector<ChannelMatrix> held_out;
    for (int s = 0; s < 1000; ++s)
        held_out.push_back(synth_channel(sample_paths(cfg, substream(100000 + s, stream::covariance)), m, n));
    const auto cov = estimate_covariance(held_out);
    for (const double snr : {0.0, 5.0, 10.0})
    {
        double ls = 0.0, lm = 0.0;
        for (int t = 0; t < 500; ++t)
        {
            const auto seed = trial_seed(3, static_cast<std::uint64_t>(t));
            const auto h = synth_channel(sample_paths(cfg, substream(seed, stream::paths)), m, n);
            const auto y = add_pilot_noise(h, snr, 1.0, substream(seed, stream::noise));
            ls += nmse(h, ls_estimate(y)).linear;
            lm += nmse(h, lmmse_estimate(y, cov)).linear;
        }
        CHECK(lm <= ls);
    }
}

TEST_CASE("nmse - examples")
{
    const auto h = synth_channel(sample_paths(PathSampling{3, 4, 4}, 1), 4, 4);
    CHECK(nmse(h, h).linear == 0.0);
    const auto zero = nmse(h, ChannelMatrix(Eigen::MatrixXcd::Zero(4, 4)));
    CHECK_THAT(zero.linear, WithinAbs(1.0, 1e-15));
    CHECK_THAT(zero.db, WithinAbs(0.0, 1e-12));
    CHECK_THAT(nmse(h, ChannelMatrix(Eigen::MatrixXcd(2.0 * h.entries()))).linear, WithinAbs(1.0, 1e-14));
    CHECK_THROWS_AS(nmse(ChannelMatrix(Eigen::MatrixXcd::Zero(4, 4)), h), DomainError);
    CHECK_THROWS_AS(nmse(h, ChannelMatrix(Eigen::MatrixXcd::Zero(3, 4))), DomainError);
}
