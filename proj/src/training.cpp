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

#include "csivis/training.hpp"

#include "csivis/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace csivis
{
    void TrainConfig::validate() const
    {
        if (epochs < 1)
            throw DomainError("epochs must be positive");
        if (batch_size < 1)
            throw DomainError("batch_size must be positive");
        if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
            throw DomainError("learning_rate must be positive");
        if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0) || !(adam_beta2 > 0.0 && adam_beta2 < 1.0))
            throw DomainError("Adam betas must lie in (0, 1)");
        if (!(adam_eps > 0.0))
            throw DomainError("Adam eps must be positive");
    }

    TrainingDivergedError::TrainingDivergedError(int epoch, int batch, double gradient_norm)
        : std::runtime_error("non-finite loss at epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch) +
                             " (gradient norm " + std::to_string(gradient_norm) + ")"),
          epoch_(epoch), batch_(batch), gradient_norm_(gradient_norm)
    {
    }

    Adam::Adam(Eigen::Index size, const TrainConfig &cfg)
        : m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)), lr_(cfg.learning_rate), b1_(cfg.adam_beta1),
          b2_(cfg.adam_beta2), eps_(cfg.adam_eps)
    {
        cfg.validate();
    }

    void Adam::step(Eigen::VectorXd &params, const Eigen::VectorXd &grad)
    {
        if (params.size() != m_.size() || grad.size() != m_.size())
            throw DomainError("Adam: parameter size mismatch");
        ++t_;
        m_ = b1_ * m_ + (1.0 - b1_) * grad;
        v_ = b2_ * v_ + (1.0 - b2_) * grad.cwiseAbs2();
        const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
        params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
    }

    std::vector<double> adam_train(Eigen::VectorXd &params, std::size_t num_samples, const BatchObjective &objective,
                                   const TrainConfig &cfg, const EpochCallback &on_epoch)
    {
        cfg.validate();
        if (num_samples == 0)
            throw DomainError("cannot train on an empty dataset");
        Adam adam(params.size(), cfg);
        Rng rng = make_rng(substream(cfg.seed, stream::shuffle));
        std::vector<std::size_t> order(num_samples);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::vector<double> trace;
        Eigen::VectorXd grad(params.size());
        const auto bs = static_cast<std::size_t>(cfg.batch_size);

        for (int epoch = 0; epoch < cfg.epochs; ++epoch)
        {
            std::shuffle(order.begin(), order.end(), rng);
            double total = 0.0;
            int batch_index = 0;
            for (std::size_t start = 0; start < num_samples; start += bs, ++batch_index)
            {
                const std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                                     order.begin() + static_cast<std::ptrdiff_t>(std::min(start + bs, num_samples)));
                grad.setZero();
                const double loss = objective(params, batch, grad);
                const double gnorm = grad.norm();
                if (!std::isfinite(loss) || !std::isfinite(gnorm))
                    throw TrainingDivergedError(epoch, batch_index, gnorm);
                total += loss * static_cast<double>(batch.size());
                adam.step(params, grad);
            }
            trace.push_back(total / static_cast<double>(num_samples));
            if (on_epoch)
                on_epoch(epoch, trace.back(), params);
        }
        return trace;
    }

    namespace
    {
        Eigen::MatrixXd gather_rows(const Eigen::MatrixXd &m, const std::vector<std::size_t> &idx)
        {
            Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
            for (std::size_t i = 0; i < idx.size(); ++i)
                out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(idx[i]));
            return out;
        }

        Eigen::VectorXd gather(const Eigen::VectorXd &v, const std::vector<std::size_t> &idx)
        {
            Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
            for (std::size_t i = 0; i < idx.size(); ++i)
                out[static_cast<Eigen::Index>(i)] = v[static_cast<Eigen::Index>(idx[i])];
            return out;
        }
    }

    DenseTrainResult train_dense_head(DenseHeadParams init, const Eigen::MatrixXd &x, const std::vector<int> &labels,
                                      const TrainConfig &cfg,
                                      const std::function<void(int, double, const DenseHeadParams &)> &on_epoch)
    {
        if (x.cols() != init.feature_dim())
            throw DomainError("dense head: feature dimension mismatch");
        if (static_cast<std::size_t>(x.rows()) != labels.size())
            throw DomainError("dense head: one label per sample required");
        DenseHeadParams work = init;
        DenseHeadParams grad = init;
        auto objective = [&](const Eigen::VectorXd &flat, const std::vector<std::size_t> &batch, Eigen::VectorXd &g)
        {
            unpack(work, flat);
            std::vector<int> lb(batch.size());
            for (std::size_t i = 0; i < batch.size(); ++i)
                lb[i] = labels[batch[i]];
            const double loss = dense_loss_grad(work, gather_rows(x, batch), lb, grad);
            g = pack(grad);
            return loss;
        };
        Eigen::VectorXd flat = pack(init);
        EpochCallback cb;
        if (on_epoch)
            cb = [&](int e, double l, const Eigen::VectorXd &p)
            {
                unpack(work, p);
                on_epoch(e, l, work);
            };
        auto trace = adam_train(flat, labels.size(), objective, cfg, cb);
        unpack(init, flat);
        return {init, trace};
    }

    LocTrainResult train_loc_head(LocHeadParams init, const Eigen::MatrixXd &x, const Eigen::VectorXd &power,
                                  const Eigen::MatrixXd &targets, const TrainConfig &cfg,
                                  const std::function<void(int, double, const LocHeadParams &)> &on_epoch)
    {
        if (x.cols() != init.feature_dim())
            throw DomainError("loc head: feature dimension mismatch");
        if (power.size() != x.rows() || targets.rows() != x.rows() || targets.cols() != 2)
            throw DomainError("loc head: inconsistent sample counts");
        LocHeadParams work = init;
        LocHeadParams grad = init;
        auto objective = [&](const Eigen::VectorXd &flat, const std::vector<std::size_t> &batch, Eigen::VectorXd &g)
        {
            unpack(work, flat);
            const double loss = loc_loss_grad(work, gather_rows(x, batch), gather(power, batch), gather_rows(targets, batch), grad);
            g = pack(grad);
            return loss;
        };
        Eigen::VectorXd flat = pack(init);
        EpochCallback cb;
        if (on_epoch)
            cb = [&](int e, double l, const Eigen::VectorXd &p)
            {
                unpack(work, p);
                on_epoch(e, l, work);
            };
        auto trace = adam_train(flat, static_cast<std::size_t>(x.rows()), objective, cfg, cb);
        unpack(init, flat);
        return {init, trace};
    }

    GradCheckResult grad_check(const LossAndGrad &f, const Eigen::VectorXd &params, const std::vector<Eigen::Index> &coords,
                               double step, const ActivationPattern &pattern)
    {
        GradCheckResult r;
        Eigen::VectorXd analytic(params.size());
        f(params, &analytic);
        Eigen::VectorXd probe = params;
        for (const auto i : coords)
        {
            if (i < 0 || i >= params.size())
                throw DomainError("grad_check: coordinate out of range");
            probe[i] = params[i] + step;
            const double up = f(probe, nullptr);
            const auto pat_up = pattern ? pattern(probe) : std::vector<std::uint8_t>{};
            probe[i] = params[i] - step;
            const double down = f(probe, nullptr);
            const auto pat_down = pattern ? pattern(probe) : std::vector<std::uint8_t>{};
            probe[i] = params[i];
            if (pattern && pat_up != pat_down)
            {
                ++r.skipped;
                continue;
            }
            const double numeric = (up - down) / (2.0 * step);
            const double abs_err = std::abs(numeric - analytic[i]);
            const double denom = std::max({std::abs(numeric), std::abs(analytic[i]), grad_check_relative_floor});
            r.max_absolute_error = std::max(r.max_absolute_error, abs_err);
            r.max_relative_error = std::max(r.max_relative_error, abs_err / denom);
            ++r.checked;
        }
        return r;
    }

    GradCheckResult grad_check_dense(const DenseHeadParams &params, const Eigen::MatrixXd &x, const std::vector<int> &labels)
    {
        DenseHeadParams work = params;
        DenseHeadParams grad = params;
        auto f = [&](const Eigen::VectorXd &flat, Eigen::VectorXd *g)
        {
            unpack(work, flat);
            if (g == nullptr)
                return cross_entropy_loss(dense_softmax_forward_batch(work, x), labels);
            const double loss = dense_loss_grad(work, x, labels, grad);
            *g = pack(grad);
            return loss;
        };
        const Eigen::VectorXd flat = pack(params);
        std::vector<Eigen::Index> coords(static_cast<std::size_t>(flat.size()));
        std::iota(coords.begin(), coords.end(), Eigen::Index{0});
        return grad_check(f, flat, coords);
    }

    GradCheckResult grad_check_loc(const LocHeadParams &params, const Eigen::MatrixXd &x, const Eigen::VectorXd &power,
                                   const Eigen::MatrixXd &targets, double fraction, std::uint64_t seed)
    {
        if (!(fraction > 0.0 && fraction <= 1.0))
            throw DomainError("grad_check_loc: fraction must lie in (0, 1]");
        LocHeadParams work = params;
        LocHeadParams grad = params;
        auto f = [&](const Eigen::VectorXd &flat, Eigen::VectorXd *g)
        {
            unpack(work, flat);
            if (g == nullptr)
                return (loc_head_forward_batch(work, x, power) - targets).squaredNorm() / (2.0 * static_cast<double>(x.rows()));
            const double loss = loc_loss_grad(work, x, power, targets, grad);
            *g = pack(grad);
            return loss;
        };
        auto pattern = [&](const Eigen::VectorXd &flat)
        {
            unpack(work, flat);
            return loc_activation_pattern(work, x, power);
        };
        const Eigen::VectorXd flat = pack(params);
        std::vector<Eigen::Index> all(static_cast<std::size_t>(flat.size()));
        std::iota(all.begin(), all.end(), Eigen::Index{0});
        Rng rng = make_rng(seed);
        std::shuffle(all.begin(), all.end(), rng);
        const auto count = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(all.size()))));
        all.resize(std::min(count, all.size()));
        std::sort(all.begin(), all.end());
        return grad_check(f, flat, all, 1e-5, pattern);
    }
}
