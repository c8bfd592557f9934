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

#ifndef csivis_heads_H
#define csivis_heads_H

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "csivis/errors.hpp"

namespace csivis
{
    // Fully connected layer, z = W^T x + b with W of size inputs x outputs.
    struct DenseLayer
    {
        Eigen::MatrixXd weights;
        Eigen::VectorXd bias;

        Eigen::Index inputs() const { return weights.rows(); }
        Eigen::Index outputs() const { return weights.cols(); }
        std::size_t param_count() const { return static_cast<std::size_t>(weights.size() + bias.size()); }

        static DenseLayer zeros(Eigen::Index inputs, Eigen::Index outputs);

        // Uniform in +-sqrt(6 / (fan_in + fan_out)), zero bias.
        static DenseLayer glorot(Eigen::Index inputs, Eigen::Index outputs, std::uint64_t seed);

        // Batch forward: rows of x are samples.
        Eigen::MatrixXd forward(const Eigen::MatrixXd &x) const;
    };

    // Flat parameter vector: each layer's weights row-major, then its bias.
    Eigen::VectorXd pack_layers(const std::vector<const DenseLayer *> &layers);
    void unpack_layers(const std::vector<DenseLayer *> &layers, const Eigen::VectorXd &flat);

    // Classification head: a single dense layer followed by softmax.
    struct DenseHeadParams
    {
        DenseLayer layer; // K x C

        Eigen::Index feature_dim() const { return layer.inputs(); }
        Eigen::Index num_classes() const { return layer.outputs(); }

        static DenseHeadParams zeros(Eigen::Index k, Eigen::Index c);
        static DenseHeadParams glorot(Eigen::Index k, Eigen::Index c, std::uint64_t seed);

        std::vector<const DenseLayer *> layers() const { return {&layer}; }
        std::vector<DenseLayer *> layers() { return {&layer}; }
    };

    // Localization head: power -> dense 8 (linear), concatenated after the K features,
    // then dense 32 (ReLU), dense 16 (ReLU), dense 2 (sigmoid).
    struct LocHeadParams
    {
        DenseLayer power_expand; // 1 x 8
        DenseLayer hidden1;      // (K + 8) x 32
        DenseLayer hidden2;      // 32 x 16
        DenseLayer out;          // 16 x 2

        Eigen::Index feature_dim() const { return hidden1.inputs() - power_expand.outputs(); }

        static LocHeadParams zeros(Eigen::Index k);
        static LocHeadParams glorot(Eigen::Index k, std::uint64_t seed);

        std::vector<const DenseLayer *> layers() const { return {&power_expand, &hidden1, &hidden2, &out}; }
        std::vector<DenseLayer *> layers() { return {&power_expand, &hidden1, &hidden2, &out}; }
    };

    template <typename Params>
    Eigen::VectorXd pack(const Params &p)
    {
        return pack_layers(p.layers());
    }

    template <typename Params>
    void unpack(Params &p, const Eigen::VectorXd &flat)
    {
        unpack_layers(p.layers(), flat);
    }

    Eigen::VectorXd softmax(const Eigen::VectorXd &logits);

    Eigen::VectorXd dense_softmax_forward(const DenseHeadParams &params, const Eigen::VectorXd &x);

    // Row-wise softmax probabilities for a batch (rows = samples).
    Eigen::MatrixXd dense_softmax_forward_batch(const DenseHeadParams &params, const Eigen::MatrixXd &x);

    // -(1/S) sum log max(p[label], 1e-12).
    inline constexpr double probability_floor = 1e-12;
    double cross_entropy_loss(const Eigen::MatrixXd &probs, const std::vector<int> &labels);

    Eigen::Vector2d loc_head_forward(const LocHeadParams &params, const Eigen::VectorXd &x, double power);
    Eigen::MatrixXd loc_head_forward_batch(const LocHeadParams &params, const Eigen::MatrixXd &x, const Eigen::VectorXd &power);

    // Mean cross-entropy over the batch; writes d loss / d params into grad.
    double dense_loss_grad(const DenseHeadParams &params, const Eigen::MatrixXd &x, const std::vector<int> &labels,
                           DenseHeadParams &grad);

    // Mean squared error over samples and both outputs: (1/(2S)) sum (y - t)^2.
    double loc_loss_grad(const LocHeadParams &params, const Eigen::MatrixXd &x, const Eigen::VectorXd &power,
                         const Eigen::MatrixXd &targets, LocHeadParams &grad);

    // Gradient of the loc-head loss with respect to its K feature inputs (used by the conv baseline).
    double loc_loss_grad(const LocHeadParams &params, const Eigen::MatrixXd &x, const Eigen::VectorXd &power,
                         const Eigen::MatrixXd &targets, LocHeadParams &grad, Eigen::MatrixXd *grad_x);

    // ReLU on/off pattern of both hidden layers, used to skip kinks during gradient checks.
    std::vector<std::uint8_t> loc_activation_pattern(const LocHeadParams &params, const Eigen::MatrixXd &x,
                                                     const Eigen::VectorXd &power);

    double classification_accuracy(const Eigen::MatrixXd &probs, const std::vector<int> &labels);

    struct HeadDescriptor
    {
        enum class Kind
        {
            dense,
            loc,
            conv_feat_ext,
            no_feat_ext
        };

        Kind kind = Kind::dense;
        Eigen::Index feature_dim = 0; // dense, loc
        Eigen::Index classes = 0;     // dense
        Eigen::Index input_h = 0;     // conv_feat_ext, no_feat_ext
        Eigen::Index input_w = 0;
        Eigen::Index input_c = 0;

        static HeadDescriptor dense(Eigen::Index k, Eigen::Index c) { return {Kind::dense, k, c, 0, 0, 0}; }
        static HeadDescriptor loc(Eigen::Index k) { return {Kind::loc, k, 0, 0, 0, 0}; }
        static HeadDescriptor conv_feat_ext(Eigen::Index channels) { return {Kind::conv_feat_ext, 0, 0, 0, 0, channels}; }
        static HeadDescriptor no_feat_ext(Eigen::Index h, Eigen::Index w, Eigen::Index c) { return {Kind::no_feat_ext, 0, 0, h, w, c}; }
    };

    std::size_t param_count(const HeadDescriptor &desc);
}

#endif
