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

#ifndef csivis_training_H
#define csivis_training_H

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "csivis/heads.hpp"

namespace csivis
{
    struct TrainConfig
    {
        int epochs = 10;
        int batch_size = 200;
        double learning_rate = 1e-3;
        double adam_beta1 = 0.9;
        double adam_beta2 = 0.999;
        double adam_eps = 1e-8;
        std::uint64_t seed = 0;

        void validate() const;
    };

    // Raised when a batch produces a non-finite loss or gradient.
    class TrainingDivergedError : public std::runtime_error
    {
    public:
        TrainingDivergedError(int epoch, int batch, double gradient_norm);
        int epoch() const { return epoch_; }
        int batch() const { return batch_; }
        double gradient_norm() const { return gradient_norm_; }

    private:
        int epoch_;
        int batch_;
        double gradient_norm_;
    };

    // Adam with bias correction over a flat parameter vector.
    class Adam
    {
    public:
        Adam(Eigen::Index size, const TrainConfig &cfg);
        void step(Eigen::VectorXd &params, const Eigen::VectorXd &grad);
        long long steps() const { return t_; }

    private:
        Eigen::VectorXd m_;
        Eigen::VectorXd v_;
        double lr_, b1_, b2_, eps_;
        long long t_ = 0;
    };

    // Mean loss over the batch (sample indices), gradient written into grad.
    using BatchObjective =
        std::function<double(const Eigen::VectorXd &params, const std::vector<std::size_t> &batch, Eigen::VectorXd &grad)>;

    // Called after each epoch with the epoch index (0-based), the per-sample mean training loss and the parameters.
    using EpochCallback = std::function<void(int epoch, double train_loss, const Eigen::VectorXd &params)>;

    // Mini-batch Adam; batches come from a seeded shuffle each epoch, the short final batch is kept
    // and the epoch loss is the per-sample average. Returns the per-epoch loss trace.
    std::vector<double> adam_train(Eigen::VectorXd &params, std::size_t num_samples, const BatchObjective &objective,
                                   const TrainConfig &cfg, const EpochCallback &on_epoch = {});

    struct DenseTrainResult
    {
        DenseHeadParams params;
        std::vector<double> loss_trace;
    };

    DenseTrainResult train_dense_head(DenseHeadParams init, const Eigen::MatrixXd &x, const std::vector<int> &labels,
                                      const TrainConfig &cfg,
                                      const std::function<void(int, double, const DenseHeadParams &)> &on_epoch = {});

    struct LocTrainResult
    {
        LocHeadParams params;
        std::vector<double> loss_trace;
    };

    // Targets are normalized positions in (0, 1)^2.
    LocTrainResult train_loc_head(LocHeadParams init, const Eigen::MatrixXd &x, const Eigen::VectorXd &power,
                                  const Eigen::MatrixXd &targets, const TrainConfig &cfg,
                                  const std::function<void(int, double, const LocHeadParams &)> &on_epoch = {});

    struct GradCheckResult
    {
        double max_relative_error = 0.0;
        double max_absolute_error = 0.0;
        std::size_t checked = 0;
        std::size_t skipped = 0; // coordinates where the activation pattern changes inside +-step
    };

    using LossAndGrad = std::function<double(const Eigen::VectorXd &params, Eigen::VectorXd *grad)>;
    using ActivationPattern = std::function<std::vector<std::uint8_t>(const Eigen::VectorXd &params)>;

    // Central differences on the listed coordinates. Relative error is
    // |g_a - g_n| / max(|g_a|, |g_n|, relative_floor).
    inline constexpr double grad_check_relative_floor = 1e-6;
    GradCheckResult grad_check(const LossAndGrad &f, const Eigen::VectorXd &params, const std::vector<Eigen::Index> &coords,
                               double step = 1e-5, const ActivationPattern &pattern = {});

    GradCheckResult grad_check_dense(const DenseHeadParams &params, const Eigen::MatrixXd &x, const std::vector<int> &labels);

    // Checks a seeded random subset of the parameters (fraction of the total, at least one).
    GradCheckResult grad_check_loc(const LocHeadParams &params, const Eigen::MatrixXd &x, const Eigen::VectorXd &power,
                                   const Eigen::MatrixXd &targets, double fraction, std::uint64_t seed);
}

#endif
