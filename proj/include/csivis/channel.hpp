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

#ifndef csivis_channel_H
#define csivis_channel_H

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

#include "csivis/errors.hpp"

namespace csivis
{
    using cdouble = std::complex<double>;

    // One propagation path in normalized units. Angle and delay are the normalized
    // spatial frequency and normalized delay, both periodic on [0, 1).
    struct PathTriplet
    {
        cdouble gain{1.0, 0.0};
        double angle = 0.0;
        double delay = 0.0;
    };

    // Throws DomainError unless angle, delay in [0, 1) and gain finite.
    void validate_path(const PathTriplet &path);

    // Spatial-frequency CSI, rows = antennas, columns = subcarriers.
    class ChannelMatrix
    {
    public:
        ChannelMatrix() = default;
        explicit ChannelMatrix(Eigen::MatrixXcd entries);

        const Eigen::MatrixXcd &entries() const { return entries_; }
        Eigen::Index num_antennas() const { return entries_.rows(); }
        Eigen::Index num_subcarriers() const { return entries_.cols(); }

    private:
        Eigen::MatrixXcd entries_;
    };

    // Received pilot Y = sqrt(P) H + W together with the power and noise metadata.
    class PilotObservation
    {
    public:
        PilotObservation(Eigen::MatrixXcd entries, double pilot_power, double noise_variance, double snr_db);

        const Eigen::MatrixXcd &entries() const { return entries_; }
        double pilot_power() const { return pilot_power_; }
        double noise_variance() const { return noise_variance_; }
        double snr_db() const { return snr_db_; }
        Eigen::Index num_antennas() const { return entries_.rows(); }
        Eigen::Index num_subcarriers() const { return entries_.cols(); }

    private:
        Eigen::MatrixXcd entries_;
        double pilot_power_;
        double noise_variance_;
        double snr_db_;
    };

    // ULA steering vector, element k = exp(-j 2 pi k angle).
    Eigen::VectorXcd steering_vector(double angle, Eigen::Index m);

    // Subcarrier phase vector, element k = exp(-j 2 pi k delay).
    Eigen::VectorXcd delay_vector(double delay, Eigen::Index n);

    // H = sum_l gain_l * a(angle_l) * b(delay_l)^H.
    //
    // The delay factor enters conjugated, as in the received-pilot model. With this
    // convention the oversampled angular-delay transform puts a path with
    // (angle, delay) = (k/(beta M), q/(gamma N)) at pixel (h = q, w = beta M - k),
    // which is what bbox_to_path inverts.
    ChannelMatrix synth_channel(const std::vector<PathTriplet> &paths, Eigen::Index m, Eigen::Index n);

    struct PathSampling
    {
        int num_paths = 1;
        Eigen::Index num_antennas = 64;
        Eigen::Index num_subcarriers = 64;
        bool on_grid = false; // snap to the oversampled DFT grid
        int grid_beta = 1;
        int grid_gamma = 1;
    };

    // Random paths with uniform angle/delay on [0, 1). Gains are circularly-symmetric
    // complex Gaussian directions scaled to unit total power (sum |gain|^2 = 1), so each
    // gain has variance 1/L and every realization satisfies ||H||^2 ~= M N.
    std::vector<PathTriplet> sample_paths(const PathSampling &cfg, std::uint64_t seed);

    // Y = sqrt(P) H + W, W ~ CN(0, sigma^2) i.i.d. with sigma^2 = P 10^(-snr_db/10).
    // snr_db = +inf gives a noiseless observation.
    PilotObservation add_pilot_noise(const ChannelMatrix &h, double snr_db, double pilot_power, std::uint64_t seed);

    // sigma^2 for a given SNR under the per-entry normalization E||H||^2 = M N.
    double noise_variance_for_snr(double snr_db, double pilot_power);
}

#endif
