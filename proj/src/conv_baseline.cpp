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

#include "csivis/conv_baseline.hpp"

#include "csivis/seeding.hpp"

#include <cmath>

namespace csivis
{
    namespace
    {
        int out_size(int in) { return (in + 1) / 2; }

        int pad_before(int in)
        {
            const int total = std::max((out_size(in) - 1) * 2 + 3 - in, 0);
            return total / 2;
        }

        struct ConvCache
        {
            FeatureMap in;
            Eigen::MatrixXd col;
            Eigen::MatrixXd z;
            FeatureMap out;
        };

        ConvCache conv_forward(const ConvLayer &layer, const FeatureMap &x)
        {
            if (x.channels() != layer.in_channels())
                throw DomainError("convolution: channel mismatch");
            ConvCache c;
            c.in = x;
            c.col = im2col_stride2(x);
            c.z = c.col * layer.kernel;
            c.z.rowwise() += layer.bias.transpose();
            c.out = FeatureMap{out_size(x.h), out_size(x.w), c.z.cwiseMax(0.0)};
            return c;
        }

        void conv_backward(const ConvLayer &layer, const ConvCache &c, const Eigen::MatrixXd &d_out,
                           ConvLayer &grad, FeatureMap *d_in)
        {
            const Eigen::MatrixXd dz = d_out.cwiseProduct((c.z.array() > 0.0).cast<double>().matrix());
            grad.kernel += c.col.transpose() * dz;
            grad.bias += dz.colwise().sum().transpose();
            if (d_in != nullptr)
                *d_in = col2im_stride2(dz * layer.kernel.transpose(), c.in.h, c.in.w, c.in.channels());
        }

        void append(Eigen::VectorXd &flat, Eigen::Index &k, const ConvLayer &l)
        {
            for (Eigen::Index i = 0; i < l.kernel.rows(); ++i)
                for (Eigen::Index j = 0; j < l.kernel.cols(); ++j)
                    flat[k++] = l.kernel(i, j);
            for (Eigen::Index j = 0; j < l.bias.size(); ++j)
                flat[k++] = l.bias[j];
        }

        void extract(const Eigen::VectorXd &flat, Eigen::Index &k, ConvLayer &l)
        {
            for (Eigen::Index i = 0; i < l.kernel.rows(); ++i)
                for (Eigen::Index j = 0; j < l.kernel.cols(); ++j)
                    l.kernel(i, j) = flat[k++];
            for (Eigen::Index j = 0; j < l.bias.size(); ++j)
                l.bias[j] = flat[k++];
        }

        ConvLayer zeros_like(const ConvLayer &l)
        {
            return {Eigen::MatrixXd::Zero(l.kernel.rows(), l.kernel.cols()), Eigen::VectorXd::Zero(l.bias.size())};
        }
    }

    ConvLayer ConvLayer::glorot(int in_c, int out_c, std::uint64_t seed)
    {
        if (in_c < 1 || out_c < 1)
            throw DomainError("convolution channel counts must be positive");
        ConvLayer l{Eigen::MatrixXd::Zero(9 * in_c, out_c), Eigen::VectorXd::Zero(out_c)};
        const double limit = std::sqrt(6.0 / (9.0 * (in_c + out_c)));
        Rng rng = make_rng(seed);
        std::uniform_real_distribution<double> u(-limit, limit);
        for (Eigen::Index i = 0; i < l.kernel.rows(); ++i)
            for (Eigen::Index j = 0; j < l.kernel.cols(); ++j)
                l.kernel(i, j) = u(rng);
        return l;
    }

    Eigen::MatrixXd im2col_stride2(const FeatureMap &x)
    {
        if (x.h < 1 || x.w < 1 || x.data.rows() != static_cast<Eigen::Index>(x.h) * x.w)
            throw DomainError("feature map shape mismatch");
        const int oh = out_size(x.h), ow = out_size(x.w), c = x.channels();
        const int py = pad_before(x.h), px = pad_before(x.w);
        Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(oh) * ow, 9 * c);
        for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox)
                for (int ky = 0; ky < 3; ++ky)
                    for (int kx = 0; kx < 3; ++kx)
                    {
                        const int iy = 2 * oy + ky - py, ix = 2 * ox + kx - px;
                        if (iy < 0 || iy >= x.h || ix < 0 || ix >= x.w)
                            continue;
                        cols.block(oy * ow + ox, (ky * 3 + kx) * c, 1, c) = x.data.row(iy * x.w + ix);
                    }
        return cols;
    }

    FeatureMap col2im_stride2(const Eigen::MatrixXd &cols, int h, int w, int c)
    {
        const int oh = out_size(h), ow = out_size(w);
        const int py = pad_before(h), px = pad_before(w);
        if (cols.rows() != static_cast<Eigen::Index>(oh) * ow || cols.cols() != 9 * c)
            throw DomainError("col2im: shape mismatch");
        FeatureMap out{h, w, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(h) * w, c)};
        for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox)
                for (int ky = 0; ky < 3; ++ky)
                    for (int kx = 0; kx < 3; ++kx)
                    {
                        const int iy = 2 * oy + ky - py, ix = 2 * ox + kx - px;
                        if (iy < 0 || iy >= h || ix < 0 || ix >= w)
                            continue;
                        out.data.row(iy * w + ix) += cols.block(oy * ow + ox, (ky * 3 + kx) * c, 1, c);
                    }
        return out;
    }

    ConvFeatExt ConvFeatExt::glorot(int in_c, std::uint64_t seed)
    {
        const auto base = substream(seed, stream::init);
        return {ConvLayer::glorot(in_c, 8, substream(base, 10)), ConvLayer::glorot(8, 32, substream(base, 11)),
                ConvLayer::glorot(32, 1024, substream(base, 12)), LocHeadParams::glorot(1024, substream(base, 13))};
    }

    Eigen::VectorXd ConvFeatExt::features(const FeatureMap &x) const
    {
        const auto c1 = conv_forward(conv1, x);
        const auto c2 = conv_forward(conv2, c1.out);
        const auto c3 = conv_forward(conv3, c2.out);
        return c3.out.data.colwise().mean().transpose();
    }

    Eigen::MatrixXd ConvFeatExt::forward_batch(const std::vector<FeatureMap> &x, const Eigen::VectorXd &power) const
    {
        Eigen::MatrixXd feats(static_cast<Eigen::Index>(x.size()), conv3.out_channels());
        for (std::size_t s = 0; s < x.size(); ++s)
            feats.row(static_cast<Eigen::Index>(s)) = features(x[s]).transpose();
        return loc_head_forward_batch(head, feats, power);
    }

    std::size_t ConvFeatExt::param_count() const
    {
        std::size_t n = conv1.param_count() + conv2.param_count() + conv3.param_count();
        for (const auto *l : head.layers())
            n += l->param_count();
        return n;
    }

    Eigen::VectorXd ConvFeatExt::pack() const
    {
        const Eigen::VectorXd h = csivis::pack(head);
        Eigen::VectorXd flat(static_cast<Eigen::Index>(param_count()));
        Eigen::Index k = 0;
        append(flat, k, conv1);
        append(flat, k, conv2);
        append(flat, k, conv3);
        flat.tail(h.size()) = h;
        return flat;
    }

    void ConvFeatExt::unpack(const Eigen::VectorXd &flat)
    {
        if (static_cast<std::size_t>(flat.size()) != param_count())
            throw DomainError("parameter vector length mismatch");
        Eigen::Index k = 0;
        extract(flat, k, conv1);
        extract(flat, k, conv2);
        extract(flat, k, conv3);
        csivis::unpack(head, Eigen::VectorXd(flat.tail(flat.size() - k)));
    }

    double conv_loss_grad(const ConvFeatExt &model, const std::vector<FeatureMap> &x, const Eigen::VectorXd &power,
                          const Eigen::MatrixXd &targets, Eigen::VectorXd &grad)
    {
        if (x.empty())
            throw DomainError("conv loss: empty batch");
        std::vector<ConvCache> c1(x.size()), c2(x.size()), c3(x.size());
        Eigen::MatrixXd feats(static_cast<Eigen::Index>(x.size()), model.conv3.out_channels());
        for (std::size_t s = 0; s < x.size(); ++s)
        {
            c1[s] = conv_forward(model.conv1, x[s]);
            c2[s] = conv_forward(model.conv2, c1[s].out);
            c3[s] = conv_forward(model.conv3, c2[s].out);
            feats.row(static_cast<Eigen::Index>(s)) = c3[s].out.data.colwise().mean();
        }
        ConvFeatExt g{zeros_like(model.conv1), zeros_like(model.conv2), zeros_like(model.conv3), model.head};
        Eigen::MatrixXd dfeat;
        const double loss = loc_loss_grad(model.head, feats, power, targets, g.head, &dfeat);
        for (std::size_t s = 0; s < x.size(); ++s)
        {
            const auto rows = c3[s].out.data.rows();
            const Eigen::MatrixXd d3 = Eigen::VectorXd::Ones(rows) * dfeat.row(static_cast<Eigen::Index>(s)) / static_cast<double>(rows);
            FeatureMap d2, d1;
            conv_backward(model.conv3, c3[s], d3, g.conv3, &d2);
            conv_backward(model.conv2, c2[s], d2.data, g.conv2, &d1);
            conv_backward(model.conv1, c1[s], d1.data, g.conv1, nullptr);
        }
        grad = g.pack();
        return loss;
    }

    ConvTrainResult train_conv_feat_ext(ConvFeatExt init, const std::vector<FeatureMap> &x, const Eigen::VectorXd &power,
                                        const Eigen::MatrixXd &targets, const TrainConfig &cfg,
                                        const std::function<void(int, double, const ConvFeatExt &)> &on_epoch)
    {
        if (power.size() != static_cast<Eigen::Index>(x.size()) || targets.rows() != power.size() || targets.cols() != 2)
            throw DomainError("conv baseline: inconsistent sample counts");
        ConvFeatExt work = init;
        auto objective = [&](const Eigen::VectorXd &flat, const std::vector<std::size_t> &batch, Eigen::VectorXd &g)
        {
            work.unpack(flat);
            std::vector<FeatureMap> bx;
            Eigen::VectorXd bp(static_cast<Eigen::Index>(batch.size()));
            Eigen::MatrixXd bt(static_cast<Eigen::Index>(batch.size()), 2);
            for (std::size_t i = 0; i < batch.size(); ++i)
            {
                bx.push_back(x[batch[i]]);
                bp[static_cast<Eigen::Index>(i)] = power[static_cast<Eigen::Index>(batch[i])];
                bt.row(static_cast<Eigen::Index>(i)) = targets.row(static_cast<Eigen::Index>(batch[i]));
            }
            return conv_loss_grad(work, bx, bp, bt, g);
        };
        Eigen::VectorXd flat = init.pack();
        EpochCallback cb;
        if (on_epoch)
            cb = [&](int e, double l, const Eigen::VectorXd &p)
            {
                work.unpack(p);
                on_epoch(e, l, work);
            };
        auto trace = adam_train(flat, x.size(), objective, cfg, cb);
        init.unpack(flat);
        return {init, trace};
    }
}
