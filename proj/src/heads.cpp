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

#include "csivis/heads.hpp"

#include "csivis/seeding.hpp"

#include <cmath>
#include <string>

namespace csivis
{
    namespace
    {
        void require(bool ok, const std::string &what)
        {
            if (!ok)
                throw DomainError(what);
        }

        Eigen::MatrixXd relu(const Eigen::MatrixXd &z)
        {
            return z.cwiseMax(0.0);
        }

        Eigen::MatrixXd sigmoid(const Eigen::MatrixXd &z)
        {
            return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
        }

        Eigen::MatrixXd row_softmax(const Eigen::MatrixXd &z)
        {
            Eigen::MatrixXd p(z.rows(), z.cols());
            for (Eigen::Index s = 0; s < z.rows(); ++s)
            {
                const double shift = z.row(s).maxCoeff();
                Eigen::RowVectorXd e = (z.row(s).array() - shift).exp();
                p.row(s) = e / e.sum();
            }
            return p;
        }

        void accumulate(DenseLayer &grad, const Eigen::MatrixXd &input, const Eigen::MatrixXd &dz)
        {
            grad.weights = input.transpose() * dz;
            grad.bias = dz.colwise().sum().transpose();
        }

        struct LocForward
        {
            Eigen::MatrixXd p8, in1, z1, a1, z2, a2, y;
        };

        LocForward loc_forward_cached(const LocHeadParams &params, const Eigen::MatrixXd &x, const Eigen::VectorXd &power)
        {
            require(x.cols() == params.feature_dim(), "loc head: feature dimension mismatch");
            require(power.size() == x.rows(), "loc head: one power value per sample required");
            LocForward f;
            f.p8 = params.power_expand.forward(Eigen::MatrixXd(power));
            f.in1.resize(x.rows(), x.cols() + f.p8.cols());
            f.in1 << x, f.p8;
            f.z1 = params.hidden1.forward(f.in1);
            f.a1 = relu(f.z1);
            f.z2 = params.hidden2.forward(f.a1);
            f.a2 = relu(f.z2);
            f.y = sigmoid(params.out.forward(f.a2));
            return f;
        }
    }

    DenseLayer DenseLayer::zeros(Eigen::Index inputs, Eigen::Index outputs)
    {
        require(inputs >= 1 && outputs >= 1, "dense layer sizes must be positive");
        return {Eigen::MatrixXd::Zero(inputs, outputs), Eigen::VectorXd::Zero(outputs)};
    }

    DenseLayer DenseLayer::glorot(Eigen::Index inputs, Eigen::Index outputs, std::uint64_t seed)
    {
        DenseLayer layer = zeros(inputs, outputs);
        const double limit = std::sqrt(6.0 / static_cast<double>(inputs + outputs));
        Rng rng = make_rng(seed);
        std::uniform_real_distribution<double> u(-limit, limit);
        for (Eigen::Index i = 0; i < inputs; ++i)
            for (Eigen::Index j = 0; j < outputs; ++j)
                layer.weights(i, j) = u(rng);
        return layer;
    }

    Eigen::MatrixXd DenseLayer::forward(const Eigen::MatrixXd &x) const
    {
        require(x.cols() == inputs(), "dense layer: input dimension mismatch");
        Eigen::MatrixXd z = x * weights;
        z.rowwise() += bias.transpose();
        return z;
    }

    Eigen::VectorXd pack_layers(const std::vector<const DenseLayer *> &layers)
    {
        std::size_t total = 0;
        for (const auto *l : layers)
            total += l->param_count();
        Eigen::VectorXd flat(static_cast<Eigen::Index>(total));
        Eigen::Index k = 0;
        for (const auto *l : layers)
        {
            for (Eigen::Index i = 0; i < l->inputs(); ++i)
                for (Eigen::Index j = 0; j < l->outputs(); ++j)
                    flat[k++] = l->weights(i, j);
            for (Eigen::Index j = 0; j < l->outputs(); ++j)
                flat[k++] = l->bias[j];
        }
        return flat;
    }

    void unpack_layers(const std::vector<DenseLayer *> &layers, const Eigen::VectorXd &flat)
    {
        std::size_t total = 0;
        for (const auto *l : layers)
            total += l->param_count();
        require(static_cast<std::size_t>(flat.size()) == total, "parameter vector length mismatch");
        Eigen::Index k = 0;
        for (auto *l : layers)
        {
            for (Eigen::Index i = 0; i < l->inputs(); ++i)
                for (Eigen::Index j = 0; j < l->outputs(); ++j)
                    l->weights(i, j) = flat[k++];
            for (Eigen::Index j = 0; j < l->outputs(); ++j)
                l->bias[j] = flat[k++];
        }
    }

    DenseHeadParams DenseHeadParams::zeros(Eigen::Index k, Eigen::Index c)
    {
        return {DenseLayer::zeros(k, c)};
    }

    DenseHeadParams DenseHeadParams::glorot(Eigen::Index k, Eigen::Index c, std::uint64_t seed)
    {
        return {DenseLayer::glorot(k, c, substream(seed, stream::init))};
    }

    LocHeadParams LocHeadParams::zeros(Eigen::Index k)
    {
        return {DenseLayer::zeros(1, 8), DenseLayer::zeros(k + 8, 32), DenseLayer::zeros(32, 16), DenseLayer::zeros(16, 2)};
    }

    LocHeadParams LocHeadParams::glorot(Eigen::Index k, std::uint64_t seed)
    {
        const auto base = substream(seed, stream::init);
        return {DenseLayer::glorot(1, 8, substream(base, 0)), DenseLayer::glorot(k + 8, 32, substream(base, 1)),
                DenseLayer::glorot(32, 16, substream(base, 2)), DenseLayer::glorot(16, 2, substream(base, 3))};
    }

    Eigen::VectorXd softmax(const Eigen::VectorXd &logits)
    {
        require(logits.size() >= 1, "softmax of an empty vector");
        return row_softmax(logits.transpose()).transpose();
    }

    Eigen::VectorXd dense_softmax_forward(const DenseHeadParams &params, const Eigen::VectorXd &x)
    {
        return dense_softmax_forward_batch(params, x.transpose()).transpose();
    }

    Eigen::MatrixXd dense_softmax_forward_batch(const DenseHeadParams &params, const Eigen::MatrixXd &x)
    {
        require(x.cols() == params.feature_dim(), "dense head: feature dimension mismatch");
        return row_softmax(params.layer.forward(x));
    }

    double cross_entropy_loss(const Eigen::MatrixXd &probs, const std::vector<int> &labels)
    {
        require(static_cast<std::size_t>(probs.rows()) == labels.size(), "cross entropy: one label per row required");
        require(!labels.empty(), "cross entropy: empty batch");
        double acc = 0.0;
        for (std::size_t s = 0; s < labels.size(); ++s)
        {
            require(labels[s] >= 0 && labels[s] < probs.cols(), "cross entropy: label out of range");
            acc -= std::log(std::max(probs(static_cast<Eigen::Index>(s), labels[s]), probability_floor));
        }
        return acc / static_cast<double>(labels.size());
    }

    Eigen::Vector2d loc_head_forward(const LocHeadParams &params, const Eigen::VectorXd &x, double power)
    {
        Eigen::VectorXd p(1);
        p[0] = power;
        return loc_head_forward_batch(params, x.transpose(), p).row(0).transpose();
    }

    Eigen::MatrixXd loc_head_forward_batch(const LocHeadParams &params, const Eigen::MatrixXd &x, const Eigen::VectorXd &power)
    {
        return loc_forward_cached(params, x, power).y;
    }

    double dense_loss_grad(const DenseHeadParams &params, const Eigen::MatrixXd &x, const std::vector<int> &labels,
                           DenseHeadParams &grad)
    {
        const Eigen::MatrixXd probs = dense_softmax_forward_batch(params, x);
        const double loss = cross_entropy_loss(probs, labels);
        Eigen::MatrixXd dz = probs;
        for (std::size_t s = 0; s < labels.size(); ++s)
            dz(static_cast<Eigen::Index>(s), labels[s]) -= 1.0;
        dz /= static_cast<double>(labels.size());
        accumulate(grad.layer, x, dz);
        return loss;
    }

    double loc_loss_grad(const LocHeadParams &params, const Eigen::MatrixXd &x, const Eigen::VectorXd &power,
                         const Eigen::MatrixXd &targets, LocHeadParams &grad)
    {
        return loc_loss_grad(params, x, power, targets, grad, nullptr);
    }

    double loc_loss_grad(const LocHeadParams &params, const Eigen::MatrixXd &x, const Eigen::VectorXd &power,
                         const Eigen::MatrixXd &targets, LocHeadParams &grad, Eigen::MatrixXd *grad_x)
    {
        require(x.rows() >= 1, "loc loss: empty batch");
        require(targets.rows() == x.rows() && targets.cols() == 2, "loc loss: targets must be S x 2");
        const auto f = loc_forward_cached(params, x, power);
        const double s = static_cast<double>(x.rows());
        const Eigen::MatrixXd diff = f.y - targets;
        const double loss = diff.squaredNorm() / (2.0 * s);

        const Eigen::MatrixXd dz3 = (diff / s).cwiseProduct(f.y.cwiseProduct((1.0 - f.y.array()).matrix()));
        accumulate(grad.out, f.a2, dz3);
        const Eigen::MatrixXd dz2 = (dz3 * params.out.weights.transpose()).cwiseProduct((f.z2.array() > 0.0).cast<double>().matrix());
        accumulate(grad.hidden2, f.a1, dz2);
        const Eigen::MatrixXd dz1 = (dz2 * params.hidden2.weights.transpose()).cwiseProduct((f.z1.array() > 0.0).cast<double>().matrix());
        accumulate(grad.hidden1, f.in1, dz1);
        const Eigen::MatrixXd din = dz1 * params.hidden1.weights.transpose();
        const Eigen::MatrixXd dp8 = din.rightCols(params.power_expand.outputs());
        accumulate(grad.power_expand, Eigen::MatrixXd(power), dp8);
        if (grad_x != nullptr)
            *grad_x = din.leftCols(x.cols());
        return loss;
    }

    std::vector<std::uint8_t> loc_activation_pattern(const LocHeadParams &params, const Eigen::MatrixXd &x,
                                                     const Eigen::VectorXd &power)
    {
        const auto f = loc_forward_cached(params, x, power);
        std::vector<std::uint8_t> out;
        out.reserve(static_cast<std::size_t>(f.z1.size() + f.z2.size()));
        for (Eigen::Index i = 0; i < f.z1.size(); ++i)
            out.push_back(f.z1.data()[i] > 0.0 ? 1 : 0);
        for (Eigen::Index i = 0; i < f.z2.size(); ++i)
            out.push_back(f.z2.data()[i] > 0.0 ? 1 : 0);
        return out;
    }

    double classification_accuracy(const Eigen::MatrixXd &probs, const std::vector<int> &labels)
    {
        require(static_cast<std::size_t>(probs.rows()) == labels.size(), "accuracy: one label per row required");
        if (labels.empty())
            return 0.0;
        std::size_t hits = 0;
        for (std::size_t s = 0; s < labels.size(); ++s)
        {
            Eigen::Index best = 0;
            probs.row(static_cast<Eigen::Index>(s)).maxCoeff(&best);
            if (best == labels[s])
                ++hits;
        }
        return static_cast<double>(hits) / static_cast<double>(labels.size());
    }

    std::size_t param_count(const HeadDescriptor &d)
    {
        const auto dense = [](Eigen::Index in, Eigen::Index out) { return static_cast<std::size_t>(in * out + out); };
        const auto loc = [&](Eigen::Index k) { return dense(1, 8) + dense(k + 8, 32) + dense(32, 16) + dense(16, 2); };
        const auto conv = [&](Eigen::Index in, Eigen::Index out) { return dense(9 * in, out); };
        switch (d.kind)
        {
        case HeadDescriptor::Kind::dense:
            require(d.feature_dim >= 1 && d.classes >= 1, "dense descriptor needs K >= 1 and C >= 1");
            return dense(d.feature_dim, d.classes);
        case HeadDescriptor::Kind::loc:
            require(d.feature_dim >= 1, "loc descriptor needs K >= 1");
            return loc(d.feature_dim);
        case HeadDescriptor::Kind::conv_feat_ext:
            require(d.input_c >= 1, "conv descriptor needs input channels >= 1");
            return conv(d.input_c, 8) + conv(8, 32) + conv(32, 1024) + loc(1024);
        case HeadDescriptor::Kind::no_feat_ext:
            require(d.input_h >= 1 && d.input_w >= 1 && d.input_c >= 1, "no-feature descriptor needs a positive input shape");
            return loc(d.input_h * d.input_w * d.input_c);
        }
        throw DomainError("unknown head descriptor");
    }
}
