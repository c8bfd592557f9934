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

#include "csivis/channel.hpp"
#include "csivis/seeding.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace csivis
{
    namespace
    {
        Eigen::VectorXcd phase_ramp(double frequency, Eigen::Index length)
        {
            Eigen::VectorXcd v(length);
            for (Eigen::Index k = 0; k < length; ++k)
            {
                const double phase = -2.0 * std::numbers::pi * static_cast<double>(k) * frequency;
                v[k] = std::polar(1.0, phase);
            }
            if (length > 0)
                v[0] = cdouble(1.0, 0.0);
            return v;
        }

        bool in_unit_interval(double x)
        {
            return x >= 0.0 && x < 1.0;
        }

        double snap(double x, Eigen::Index grid_size)
        {
            const double g = static_cast<double>(grid_size);
            const auto bin = static_cast<long long>(std::llround(x * g)) % grid_size;
            return static_cast<double>(bin) / g;
        }
    }

    void validate_path(const PathTriplet &path)
    {
        if (!in_unit_interval(path.angle))
            throw DomainError("Path angle must lie in [0, 1), got " + std::to_string(path.angle) + ".");
        if (!in_unit_interval(path.delay))
            throw DomainError("Path delay must lie in [0, 1), got " + std::to_string(path.delay) + ".");
        if (!std::isfinite(path.gain.real()) || !std::isfinite(path.gain.imag()))
            throw DomainError("Path gain must be finite.");
    }

    ChannelMatrix::ChannelMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries))
    {
        if (entries_.rows() < 1 || entries_.cols() < 1)
            throw DomainError("Channel matrix must have at least one antenna and one subcarrier.");
        if (!entries_.allFinite())
            throw DomainError("Channel matrix entries must be finite.");
    }

    PilotObservation::PilotObservation(Eigen::MatrixXcd entries, double pilot_power, double noise_variance, double snr_db)
        : entries_(std::move(entries)), pilot_power_(pilot_power), noise_variance_(noise_variance), snr_db_(snr_db)
    {
        if (entries_.rows() < 1 || entries_.cols() < 1)
            throw DomainError("Pilot observation must be non-empty.");
        if (!(pilot_power_ > 0.0) || !std::isfinite(pilot_power_))
            throw DomainError("Pilot power must be positive and finite.");
        if (!(noise_variance_ >= 0.0) || !std::isfinite(noise_variance_))
            throw DomainError("Noise variance must be non-negative and finite.");
    }

    Eigen::VectorXcd steering_vector(double angle, Eigen::Index m)
    {
        if (!in_unit_interval(angle))
            throw DomainError("Steering angle must lie in [0, 1).");
        if (m < 1)
            throw DomainError("Number of antennas must be positive.");
        return phase_ramp(angle, m);
    }

    Eigen::VectorXcd delay_vector(double delay, Eigen::Index n)
    {
        if (!in_unit_interval(delay))
            throw DomainError("Delay must lie in [0, 1).");
        if (n < 1)
            throw DomainError("Number of subcarriers must be positive.");
        return phase_ramp(delay, n);
    }

    ChannelMatrix synth_channel(const std::vector<PathTriplet> &paths, Eigen::Index m, Eigen::Index n)
    {
        if (paths.empty())
            throw DomainError("synth_channel requires at least one path.");
        if (m < 1 || n < 1)
            throw DomainError("Channel dimensions must be positive.");

        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m, n);
        for (const auto &p : paths)
        {
            validate_path(p);
            const Eigen::VectorXcd a = steering_vector(p.angle, m);
            const Eigen::VectorXcd b = delay_vector(p.delay, n);
            h.noalias() += p.gain * a * b.adjoint();
        }
        return ChannelMatrix(std::move(h));
    }

    std::vector<PathTriplet> sample_paths(const PathSampling &cfg, std::uint64_t seed)
    {
        if (cfg.num_paths < 1)
            throw DomainError("sample_paths requires at least one path.");
        if (cfg.num_antennas < 1 || cfg.num_subcarriers < 1)
            throw DomainError("sample_paths requires positive channel dimensions.");
        if (cfg.on_grid && (cfg.grid_beta < 1 || cfg.grid_gamma < 1))
            throw DomainError("Grid oversampling factors must be positive.");

        auto rng = make_rng(seed);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        std::normal_distribution<double> normal(0.0, std::sqrt(0.5));

        std::vector<PathTriplet> paths(static_cast<std::size_t>(cfg.num_paths));
        double total_power = 0.0;
        for (auto &p : paths)
        {
            const double re = normal(rng);
            const double im = normal(rng);
            p.gain = cdouble(re, im);
            p.angle = uniform(rng);
            p.delay = uniform(rng);
            total_power += std::norm(p.gain);
            if (cfg.on_grid)
            {
                p.angle = snap(p.angle, cfg.grid_beta * cfg.num_antennas);
                p.delay = snap(p.delay, cfg.grid_gamma * cfg.num_subcarriers);
            }
        }
        const double scale = 1.0 / std::sqrt(total_power);
        for (auto &p : paths)
            p.gain *= scale;
        return paths;
    }

    double noise_variance_for_snr(double snr_db, double pilot_power)
    {
        if (std::isinf(snr_db) && snr_db > 0.0)
            return 0.0;
        return pilot_power * std::pow(10.0, -snr_db / 10.0);
    }

    PilotObservation add_pilot_noise(const ChannelMatrix &h, double snr_db, double pilot_power, std::uint64_t seed)
    {
        if (!(pilot_power > 0.0))
            throw DomainError("Pilot power must be positive.");
        if (std::isnan(snr_db))
            throw DomainError("SNR must not be NaN.");

        const double sigma2 = noise_variance_for_snr(snr_db, pilot_power);
        Eigen::MatrixXcd y = std::sqrt(pilot_power) * h.entries();
        if (sigma2 > 0.0)
        {
            auto rng = make_rng(seed);
            std::normal_distribution<double> normal(0.0, std::sqrt(sigma2 / 2.0));
            for (Eigen::Index c = 0; c < y.cols(); ++c)
                for (Eigen::Index r = 0; r < y.rows(); ++r)
                {
                    const double re = normal(rng);
                    const double im = normal(rng);
                    y(r, c) += cdouble(re, im);
                }
        }
        return PilotObservation(std::move(y), pilot_power, sigma2, snr_db);
    }
}
