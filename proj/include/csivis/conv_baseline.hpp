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

#ifndef csivis_conv_baseline_H
#define csivis_conv_baseline_H

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

#include "csivis/heads.hpp"
#include "csivis/training.hpp"

namespace csivis
{
    // Feature map of size h x w x c stored as an (h w) x c matrix, row index = y w + x.
    struct FeatureMap
    {
        int h = 0;
        int w = 0;
        Eigen::MatrixXd data;

        int channels() const { return static_cast<int>(data.cols()); }
    };

    // 3x3 convolution, stride 2, "same" padding (output ceil(in / 2), extra pad row/column at the end).
    struct ConvLayer
    {
        Eigen::MatrixXd kernel; // (9 in_c) x out_c, row index = (ky 3 + kx) in_c + c
        Eigen::VectorXd bias;

        int in_channels() const { return static_cast<int>(kernel.rows() / 9); }
        int out_channels() const { return static_cast<int>(kernel.cols()); }
        std::size_t param_count() const { return static_cast<std::size_t>(kernel.size() + bias.size()); }

        static ConvLayer glorot(int in_c, int out_c, std::uint64_t seed);
    };

    Eigen::MatrixXd im2col_stride2(const FeatureMap &x);
    FeatureMap col2im_stride2(const Eigen::MatrixXd &cols, int h, int w, int c);

    // Convolutional front end (8, 32, 1024 filters, ReLU, global average pooling) feeding a K = 1024 localization head.
    struct ConvFeatExt
    {
        ConvLayer conv1;
        ConvLayer conv2;
        ConvLayer conv3;
        LocHeadParams head;

        static ConvFeatExt glorot(int in_c, std::uint64_t seed);

        Eigen::VectorXd features(const FeatureMap &x) const;
        Eigen::MatrixXd forward_batch(const std::vector<FeatureMap> &x, const Eigen::VectorXd &power) const;
        std::size_t param_count() const;

        Eigen::VectorXd pack() const;
        void unpack(const Eigen::VectorXd &flat);
    };

    // Same loss as the localization head, (1/(2S)) sum (y - t)^2.
    double conv_loss_grad(const ConvFeatExt &model, const std::vector<FeatureMap> &x, const Eigen::VectorXd &power,
                          const Eigen::MatrixXd &targets, Eigen::VectorXd &grad);

    struct ConvTrainResult
    {
        ConvFeatExt model;
        std::vector<double> loss_trace;
    };

    ConvTrainResult train_conv_feat_ext(ConvFeatExt init, const std::vector<FeatureMap> &x, const Eigen::VectorXd &power,
                                        const Eigen::MatrixXd &targets, const TrainConfig &cfg,
                                        const std::function<void(int, double, const ConvFeatExt &)> &on_epoch = {});
}

#endif
