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

#ifndef csivis_estimation_H
#define csivis_estimation_H

#include <Eigen/Dense>

#include <vector>

#include "csivis/channel.hpp"
#include "csivis/detection.hpp"

namespace csivis
{
    struct GainFit
    {
        Eigen::VectorXcd gains;
        double residual_energy = 0.0; // ||vec(Y)/sqrt(P) - A gains||^2
        double condition_hint = 0.0;  // |r_00| / |r_kk| of the pivoted QR factor
    };

    // The LS dictionary has (numerically) dependent columns.
    class DegenerateDictionaryError : public DomainError
    {
    public:
        DegenerateDictionaryError(std::size_t first, std::size_t second);
        std::size_t first() const { return first_; }
        std::size_t second() const { return second_; }

    private:
        std::size_t first_;
        std::size_t second_;
    };

    class CovarianceModel
    {
    public:
        // Validates Hermitian symmetry (1e-10) and PSD (eigenvalues >= -1e-8 trace).
        CovarianceModel(Eigen::MatrixXcd antenna_cov, int sample_count);

        const Eigen::MatrixXcd &antenna_cov() const { return cov_; }
        int sample_count() const { return sample_count_; }
        Eigen::Index dimension() const { return cov_.rows(); }

    private:
        Eigen::MatrixXcd cov_;
        int sample_count_;
    };

    struct Nmse
    {
        double linear = 0.0;
        double db = 0.0;
    };

    // Column l of the dictionary is vec(a(theta_l) b(T_l)^H), column-major.
    Eigen::MatrixXcd path_dictionary(const std::vector<DetectedPath> &paths, Eigen::Index m, Eigen::Index n);

    // Least-squares path gains via column-pivoted Householder QR.
    GainFit ls_gains(const PilotObservation &y, const std::vector<DetectedPath> &paths);

    ChannelMatrix reconstruct(const std::vector<DetectedPath> &paths, const Eigen::VectorXcd &gains, Eigen::Index m, Eigen::Index n);

    // H_hat = Y / sqrt(P).
    ChannelMatrix ls_estimate(const PilotObservation &y);

    // R = 1/(S N) sum over all columns of all samples of h h^H, Hermitian-symmetrized.
    CovarianceModel estimate_covariance(const std::vector<ChannelMatrix> &samples);

    // Per-subcarrier antenna-domain LMMSE: h_n = R (R + sigma^2/P I)^-1 y_n / sqrt(P).
    ChannelMatrix lmmse_estimate(const PilotObservation &y, const CovarianceModel &cov);

    Nmse nmse(const ChannelMatrix &truth, const ChannelMatrix &estimate);

    struct PipelineEstimate
    {
        std::vector<Detection> detections;
        std::vector<DetectedPath> paths;
        GainFit fit;
        ChannelMatrix channel;
    };

    // Transform -> normalize -> built-in peak detection -> LS gains -> reconstruction.
    PipelineEstimate detect_and_fit(const PilotObservation &y, int beta, int gamma, const PeakDetectorConfig &detector);

    // Same, with detections supplied by an external detector for the given image geometry.
    PipelineEstimate fit_detections(const PilotObservation &y, int beta, int gamma, std::vector<Detection> detections);
}

#endif
