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

#include "csivis/harness.hpp"

#include "csivis/channel.hpp"
#include "csivis/conv_baseline.hpp"
#include "csivis/datasets.hpp"
#include "csivis/detection.hpp"
#include "csivis/estimation.hpp"
#include "csivis/seeding.hpp"
#include "csivis/training.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace csivis
{
    namespace
    {
        std::string num(double v, int digits = 6)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.*f", digits, v);
            return buf;
        }

        double to_db(double linear) { return 10.0 * std::log10(linear); }

        struct Standardizer
        {
            Eigen::RowVectorXd mean;
            Eigen::RowVectorXd scale;

            static Standardizer fit(const Eigen::MatrixXd &x, const std::vector<std::size_t> &rows)
            {
                Standardizer s;
                s.mean = Eigen::RowVectorXd::Zero(x.cols());
                for (const auto r : rows)
                    s.mean += x.row(static_cast<Eigen::Index>(r));
                s.mean /= static_cast<double>(rows.size());
                Eigen::RowVectorXd var = Eigen::RowVectorXd::Zero(x.cols());
                for (const auto r : rows)
                    var += (x.row(static_cast<Eigen::Index>(r)) - s.mean).array().square().matrix();
                var /= static_cast<double>(rows.size());
                s.scale = var.array().sqrt().max(1e-8).inverse().matrix();
                return s;
            }

            Eigen::MatrixXd apply(const Eigen::MatrixXd &x, const std::vector<std::size_t> &rows) const
            {
                Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
                for (std::size_t i = 0; i < rows.size(); ++i)
                    out.row(static_cast<Eigen::Index>(i)) =
                        ((x.row(static_cast<Eigen::Index>(rows[i])) - mean).array() * scale.array()).matrix();
                return out;
            }
        };

        Eigen::MatrixXd pick_rows(const Eigen::MatrixXd &m, const std::vector<std::size_t> &rows)
        {
            Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
            for (std::size_t i = 0; i < rows.size(); ++i)
                out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
            return out;
        }

        std::uint64_t ce_base_seed(std::uint64_t master, int trial, int path_count)
        {
            return substream(trial_seed(master, static_cast<std::uint64_t>(trial)), static_cast<std::uint64_t>(path_count));
        }

        PathSampling ce_sampling(const ExperimentConfig &cfg, int path_count)
        {
            PathSampling s;
            s.num_paths = path_count;
            s.num_antennas = cfg.m;
            s.num_subcarriers = cfg.n;
            s.on_grid = cfg.on_grid;
            s.grid_beta = cfg.beta;
            s.grid_gamma = cfg.gamma;
            return s;
        }
    }

    void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)> &task)
    {
        if (workers < 1)
            throw DomainError("worker count must be positive");
        const std::size_t pool_size = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
        if (pool_size <= 1)
        {
            for (std::size_t i = 0; i < count; ++i)
                task(i);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        std::mutex mutex;
        std::size_t failed_index = count;
        std::exception_ptr error;
        auto worker = [&]
        {
            for (std::size_t i = next++; i < count && !failed.load(); i = next++)
            {
                try
                {
                    task(i);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(mutex);
                    if (i < failed_index)
                    {
                        failed_index = i;
                        error = std::current_exception();
                    }
                    failed = true;
                }
            }
        };
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < pool_size; ++w)
            pool.emplace_back(worker);
        for (auto &t : pool)
            t.join();
        if (error)
            std::rethrow_exception(error);
    }

    std::string csv_preamble(const ExperimentConfig &cfg)
    {
        std::string out;
        for (const auto &[k, v] : cfg.resolved())
            out += "# " + k + " = " + v + "\n";
        return out;
    }

    CeSweepResult run_ce_sweep(const ExperimentConfig &cfg)
    {
        cfg.validate();
        const std::size_t num_snr = cfg.snr_db_list.size();
        const auto trials = static_cast<std::size_t>(cfg.trials);
        const bool external = cfg.detector == "external";
        std::unique_ptr<DetectionClient> client;
        if (external)
        {
            ExternalDetectorConfig ec;
            ec.endpoint = cfg.endpoint;
            ec.prompt = cfg.prompt;
            ec.timeout = std::chrono::milliseconds(cfg.detector_timeout_ms);
            ec.max_in_flight = cfg.detector_in_flight;
            client = std::make_unique<DetectionClient>(ec);
        }

        struct TrialOutcome
        {
            double pipeline = 0.0, lmmse = 0.0, ls = 0.0;
            bool fallback = false;
        };
        // outcomes[L index][snr index][trial]
        std::vector<std::vector<std::vector<TrialOutcome>>> outcomes(cfg.path_counts.size(),
                                                                     std::vector<std::vector<TrialOutcome>>(num_snr, std::vector<TrialOutcome>(trials)));

        for (std::size_t li = 0; li < cfg.path_counts.size(); ++li)
        {
            const int l = cfg.path_counts[li];
            const PathSampling sampling = ce_sampling(cfg, l);

            std::vector<ChannelMatrix> held_out(static_cast<std::size_t>(cfg.covariance_samples));
            const auto cov_seed = substream(substream(cfg.master_seed, stream::covariance), static_cast<std::uint64_t>(l));
            parallel_for(held_out.size(), cfg.workers, [&](std::size_t j)
                         { held_out[j] = synth_channel(sample_paths(sampling, substream(cov_seed, j)), cfg.m, cfg.n); });
            const CovarianceModel cov = estimate_covariance(held_out);
            held_out.clear();

            PeakDetectorConfig det = PeakDetectorConfig::for_oversampling(cfg.beta, cfg.gamma);
            if (cfg.known_count)
                det.known_count = l;

            for (std::size_t si = 0; si < num_snr; ++si)
            {
                const double snr = cfg.snr_db_list[si];
                std::vector<ChannelMatrix> truth(trials);
                std::vector<std::optional<PilotObservation>> obs(trials);
                parallel_for(trials, cfg.workers, [&](std::size_t t)
                             {
                                 const auto base = ce_base_seed(cfg.master_seed, static_cast<int>(t), l);
                                 truth[t] = synth_channel(sample_paths(sampling, substream(base, stream::paths)), cfg.m, cfg.n);
                                 obs[t] = add_pilot_noise(truth[t], snr, 1.0, substream(substream(base, si), stream::noise)); });

                DetectionClient::BatchResult remote;
                if (external)
                {
                    std::vector<CsiImage> images(trials);
                    parallel_for(trials, cfg.workers, [&](std::size_t t)
                                 { images[t] = encode_rgb_colormap(modulus_normalize(to_angular_delay(*obs[t], cfg.beta, cfg.gamma)).values); });
                    remote = client->detect_batch(images);
                }

                auto &cell = outcomes[li][si];
                parallel_for(trials, cfg.workers, [&](std::size_t t)
                             {
                                 const auto &y = *obs[t];
                                 std::optional<PipelineEstimate> est;
                                 if (external && !remote.errors[t])
                                 {
                                     auto dets = remote.detections[t];
                                     if (cfg.known_count && dets.size() > static_cast<std::size_t>(l))
                                         dets.resize(static_cast<std::size_t>(l));
                                     try
                                     {
                                         est = fit_detections(y, cfg.beta, cfg.gamma, dets);
                                     }
                                     catch (const std::invalid_argument &)
                                     {
                                         est.reset();
                                     }
                                 }
                                 if (!est)
                                 {
                                     cell[t].fallback = external;
                                     est = detect_and_fit(y, cfg.beta, cfg.gamma, det);
                                 }
                                 cell[t].pipeline = nmse(truth[t], est->channel).linear;
                                 cell[t].lmmse = nmse(truth[t], lmmse_estimate(y, cov)).linear;
                                 cell[t].ls = nmse(truth[t], ls_estimate(y)).linear; });
            }
        }

        CeSweepResult result;
        for (std::size_t si = 0; si < num_snr; ++si)
            for (std::size_t li = 0; li < cfg.path_counts.size(); ++li)
            {
                double p = 0.0, lm = 0.0, ls = 0.0;
                int fb = 0;
                for (const auto &o : outcomes[li][si])
                {
                    p += o.pipeline;
                    lm += o.lmmse;
                    ls += o.ls;
                    fb += o.fallback ? 1 : 0;
                }
                const double tr = static_cast<double>(trials);
                const double snr = cfg.snr_db_list[si];
                const int l = cfg.path_counts[li];
                result.rows.push_back({snr, l, "pipeline", to_db(p / tr), cfg.trials, fb});
                result.rows.push_back({snr, l, "lmmse", to_db(lm / tr), cfg.trials, 0});
                result.rows.push_back({snr, l, "ls", to_db(ls / tr), cfg.trials, 0});
            }

        std::string csv = csv_preamble(cfg) + "snr_db,path_count,method,mean_nmse_db,trials,fallbacks\n";
        for (const auto &r : result.rows)
            csv += num(r.snr_db, 3) + "," + std::to_string(r.path_count) + "," + r.method + "," + num(r.mean_nmse_db) + "," +
                   std::to_string(r.trials) + "," + std::to_string(r.fallbacks) + "\n";
        result.csv = std::move(csv);
        return result;
    }

    HarResult run_har(const ExperimentConfig &cfg)
    {
        cfg.validate();
        HarResult result;
        std::vector<int> labels;
        Eigen::MatrixXd features;
        std::vector<std::string> splits;

        if (!cfg.har_features.empty())
        {
            result.features = read_features(cfg.har_features);
            if (result.features.dim() != static_cast<std::uint32_t>(cfg.har_k))
                throw ConfigError("'har.k' is " + std::to_string(cfg.har_k) + " but " + cfg.har_features + " has K = " +
                                  std::to_string(result.features.dim()));
            result.manifest = read_manifest(cfg.har_manifest, result.features);
            if (result.manifest.task != TaskKind::har)
                throw ConfigError(cfg.har_manifest + " is not an activity-recognition manifest");
            const Eigen::MatrixXd all = result.features.as_double();
            features.resize(static_cast<Eigen::Index>(result.manifest.rows.size()), all.cols());
            for (std::size_t i = 0; i < result.manifest.rows.size(); ++i)
            {
                const auto &row = result.manifest.rows[i];
                features.row(static_cast<Eigen::Index>(i)) = all.row(row.feature_row);
                labels.push_back(*row.label);
                splits.push_back(row.split);
            }
        }
        else
        {
            const auto groups = cfg.har_csv.empty()
                                    ? gen_har_synthetic(cfg.har_groups_per_class, cfg.har_t, cfg.har_m, cfg.har_n,
                                                        substream(cfg.master_seed, stream::paths))
                                    : ingest_har_csv(cfg.har_csv, cfg.har_t, cfg.har_m, cfg.har_n);
            if (groups.empty())
                throw ConfigError("no activity groups to train on");
            std::vector<CsiImage> images(groups.size());
            parallel_for(groups.size(), cfg.workers, [&](std::size_t i)
                         { images[i] = grayscale_reshape_resize(groups[i].modulus, cfg.har_image_size, cfg.har_image_size); });
            const MockExtractor extractor(images.front().pixels.size(), cfg.har_k, cfg.master_seed);
            features = extractor.extract_batch(images);
            result.features.rows = features.cast<float>();
            result.features.source_id = extractor.source_id();
            // Training uses the stored single-precision values.
            features = result.features.as_double();
            for (const auto &g : groups)
                labels.push_back(g.label);
            splits.assign(groups.size(), "");
        }

        std::vector<std::size_t> train, test;
        if (std::all_of(splits.begin(), splits.end(), [](const std::string &s) { return !s.empty(); }))
        {
            for (std::size_t i = 0; i < splits.size(); ++i)
                (splits[i] == "test" ? test : train).push_back(i);
        }
        else
        {
            Rng rng = make_rng(substream(cfg.master_seed, stream::split));
            for (int c = 0; c < har_num_classes; ++c)
            {
                std::vector<std::size_t> members;
                for (std::size_t i = 0; i < labels.size(); ++i)
                    if (labels[i] == c)
                        members.push_back(i);
                std::shuffle(members.begin(), members.end(), rng);
                const auto n_test = static_cast<std::size_t>(std::ceil(cfg.har_test_fraction * static_cast<double>(members.size())));
                for (std::size_t j = 0; j < members.size(); ++j)
                    (j < n_test ? test : train).push_back(members[j]);
            }
            std::sort(train.begin(), train.end());
            std::sort(test.begin(), test.end());
            for (std::size_t i = 0; i < splits.size(); ++i)
                splits[i] = "train";
            for (const auto i : test)
                splits[i] = "test";
        }
        if (train.empty() || test.empty())
            throw ConfigError("the train/test split leaves an empty side");

        if (cfg.har_features.empty())
        {
            result.manifest = Manifest{TaskKind::har, static_cast<std::uint32_t>(cfg.har_k), har_num_classes, {}};
            for (std::size_t i = 0; i < labels.size(); ++i)
                result.manifest.rows.push_back({"group-" + std::to_string(i), static_cast<std::uint32_t>(i), labels[i], std::nullopt,
                                                std::nullopt, splits[i]});
        }

        const auto scaler = Standardizer::fit(features, train);
        const Eigen::MatrixXd x_train = scaler.apply(features, train);
        const Eigen::MatrixXd x_test = scaler.apply(features, test);
        std::vector<int> y_train, y_test;
        for (const auto i : train)
            y_train.push_back(labels[i]);
        for (const auto i : test)
            y_test.push_back(labels[i]);

        TrainConfig tc = cfg.har_train;
        tc.seed = cfg.master_seed;
        auto trained = train_dense_head(DenseHeadParams::glorot(cfg.har_k, har_num_classes, cfg.master_seed), x_train, y_train, tc,
                                        [&](int epoch, double loss, const DenseHeadParams &p)
                                        {
                                            const double acc = classification_accuracy(dense_softmax_forward_batch(p, x_test), y_test);
                                            result.rows.push_back({epoch + 1, loss, acc});
                                        });
        result.head = trained.params;
        result.param_count = param_count(HeadDescriptor::dense(cfg.har_k, har_num_classes));
        result.train_accuracy = classification_accuracy(dense_softmax_forward_batch(result.head, x_train), y_train);
        result.test_accuracy = result.rows.back().test_accuracy;

        std::string csv = csv_preamble(cfg);
        csv += "# param_count = " + std::to_string(result.param_count) + "\n";
        csv += "epoch,train_loss,test_accuracy\n";
        for (const auto &r : result.rows)
            csv += std::to_string(r.epoch) + "," + num(r.train_loss) + "," + num(r.test_accuracy) + "\n";
        result.csv = std::move(csv);
        return result;
    }

    LocResult run_loc(const ExperimentConfig &cfg)
    {
        cfg.validate();
        LocScenario scenario;
        scenario.bs_position = cfg.loc_bs;
        scenario.region_center = cfg.loc_center;
        scenario.region_radius = cfg.loc_radius;
        scenario.num_samples = cfg.loc_samples;
        const auto data = gen_loc_dataset(scenario, cfg.loc_paths_per_user, substream(cfg.master_seed, stream::paths), cfg.loc_m, cfg.loc_n);
        const auto scaler = PositionScaler::for_scenario(scenario);
        const auto count = data.size();
        const int side = cfg.loc_image_size;

        std::vector<std::size_t> order(count);
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng = make_rng(substream(cfg.master_seed, stream::split));
        std::shuffle(order.begin(), order.end(), rng);
        const auto n_test = static_cast<std::size_t>(std::ceil(cfg.loc_test_fraction * static_cast<double>(count)));
        std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
        std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
        std::sort(train.begin(), train.end());
        std::sort(test.begin(), test.end());
        if (train.empty() || test.empty())
            throw ConfigError("the train/test split leaves an empty side");

        Eigen::MatrixXd targets(static_cast<Eigen::Index>(count), 2);
        for (std::size_t i = 0; i < count; ++i)
        {
            const auto u = scaler.normalize(data[i].position);
            targets(static_cast<Eigen::Index>(i), 0) = u[0];
            targets(static_cast<Eigen::Index>(i), 1) = u[1];
        }
        const Eigen::MatrixXd t_train = pick_rows(targets, train);

        const auto mean_error = [&](const Eigen::MatrixXd &pred)
        {
            double acc = 0.0;
            for (std::size_t i = 0; i < test.size(); ++i)
            {
                const auto p = scaler.denormalize({pred(static_cast<Eigen::Index>(i), 0), pred(static_cast<Eigen::Index>(i), 1)});
                const auto &truth = data[test[i]].position;
                acc += std::hypot(p[0] - truth[0], p[1] - truth[1]);
            }
            return acc / static_cast<double>(test.size());
        };

        const MockExtractor extractor(static_cast<std::size_t>(side) * side * 3, cfg.loc_k, cfg.master_seed);
        LocResult result;
        for (std::size_t si = 0; si < cfg.loc_snr_db_list.size(); ++si)
        {
            const double snr = cfg.loc_snr_db_list[si];
            std::vector<CsiImage> images(count);
            Eigen::VectorXd log_power(static_cast<Eigen::Index>(count));
            parallel_for(count, cfg.workers, [&](std::size_t i)
                         {
                             const auto seed = substream(substream(trial_seed(cfg.master_seed, i), si), stream::noise);
                             const auto y = add_pilot_noise(data[i].channel, snr, 1.0, seed);
                             auto enc = encode_two_channel_zero(to_angular_delay(y, cfg.loc_beta, cfg.loc_gamma), side, side);
                             log_power[static_cast<Eigen::Index>(i)] = std::log10(std::max(enc.channel_power, 1e-300));
                             images[i] = std::move(enc.image); });

            Eigen::MatrixXd features(static_cast<Eigen::Index>(count), cfg.loc_k);
            const std::size_t chunk = 256;
            std::vector<std::size_t> starts;
            for (std::size_t s = 0; s < count; s += chunk)
                starts.push_back(s);
            parallel_for(starts.size(), cfg.workers, [&](std::size_t c)
                         {
                             const auto b = starts[c], e = std::min(b + chunk, count);
                             const std::vector<CsiImage> part(images.begin() + static_cast<std::ptrdiff_t>(b), images.begin() + static_cast<std::ptrdiff_t>(e));
                             features.middleRows(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(e - b)) = extractor.extract_batch(part); });

            Eigen::MatrixXd raw(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(side) * side * 2);
            for (std::size_t i = 0; i < count; ++i)
                for (int p = 0; p < side * side; ++p)
                {
                    raw(static_cast<Eigen::Index>(i), 2 * p) = images[i].pixels[static_cast<std::size_t>(3 * p)] / 255.0;
                    raw(static_cast<Eigen::Index>(i), 2 * p + 1) = images[i].pixels[static_cast<std::size_t>(3 * p + 1)] / 255.0;
                }

            Eigen::MatrixXd lp(log_power);
            const auto power_scaler = Standardizer::fit(lp, train);
            const Eigen::VectorXd p_train = power_scaler.apply(lp, train).col(0);
            const Eigen::VectorXd p_test = power_scaler.apply(lp, test).col(0);

            TrainConfig tc = cfg.loc_train;
            tc.seed = substream(cfg.master_seed, si);

            const auto run_head = [&](const std::string &method, const Eigen::MatrixXd &inputs, std::uint64_t init_seed)
            {
                const auto sc = Standardizer::fit(inputs, train);
                const Eigen::MatrixXd x_train = sc.apply(inputs, train);
                const Eigen::MatrixXd x_test = sc.apply(inputs, test);
                auto trained = train_loc_head(LocHeadParams::glorot(inputs.cols(), init_seed), x_train, p_train, t_train, tc,
                                              [&](int epoch, double loss, const LocHeadParams &p)
                                              { result.rows.push_back({snr, method, epoch + 1, loss, mean_error(loc_head_forward_batch(p, x_test, p_test))}); });
                result.summaries.push_back({snr, method, result.rows.back().mean_error_m, param_count(HeadDescriptor::loc(inputs.cols()))});
                return trained.params;
            };

            result.head = run_head("feature_head", features, cfg.master_seed);
            run_head("no_feat_ext", raw, cfg.master_seed);

            if (cfg.loc_conv_baseline)
            {
                std::vector<FeatureMap> maps(count);
                for (std::size_t i = 0; i < count; ++i)
                    maps[i] = FeatureMap{side, side, Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>>(raw.row(static_cast<Eigen::Index>(i)).data(), side * side, 2)};
                std::vector<FeatureMap> train_maps, test_maps;
                for (const auto i : train)
                    train_maps.push_back(maps[i]);
                for (const auto i : test)
                    test_maps.push_back(maps[i]);
                TrainConfig cc = tc;
                cc.epochs = cfg.loc_conv_epochs;
                const auto model = ConvFeatExt::glorot(2, cfg.master_seed);
                train_conv_feat_ext(model, train_maps, p_train, t_train, cc, [&](int epoch, double loss, const ConvFeatExt &m)
                                    { result.rows.push_back({snr, "conv_feat_ext", epoch + 1, loss, mean_error(m.forward_batch(test_maps, p_test))}); });
                result.summaries.push_back({snr, "conv_feat_ext", result.rows.back().mean_error_m, model.param_count()});
            }
        }

        std::string csv = csv_preamble(cfg);
        for (const auto &s : result.summaries)
            csv += "# param_count " + s.method + " = " + std::to_string(s.param_count) + "\n";
        csv += "snr_db,method,epoch,train_loss,mean_error_m\n";
        for (const auto &r : result.rows)
            csv += num(r.snr_db, 3) + "," + r.method + "," + std::to_string(r.epoch) + "," + num(r.train_loss) + "," + num(r.mean_error_m) + "\n";
        result.csv = std::move(csv);
        return result;
    }

    Eigen::MatrixXd image_intensity(const CsiImage &image)
    {
        Eigen::MatrixXd out(image.height, image.width);
        if (image.encoding != ImageEncoding::colormap)
        {
            for (int h = 0; h < image.height; ++h)
                for (int w = 0; w < image.width; ++w)
                    out(h, w) = image.at(h, w, 0) / 255.0;
            return out;
        }
        const int levels = 1024;
        Eigen::MatrixXd ramp(1, levels);
        for (int i = 0; i < levels; ++i)
            ramp(0, i) = static_cast<double>(i) / (levels - 1);
        const auto lut = encode_rgb_colormap(ramp);
        std::map<std::array<std::uint8_t, 3>, double> cache;
        for (int h = 0; h < image.height; ++h)
            for (int w = 0; w < image.width; ++w)
            {
                const std::array<std::uint8_t, 3> px{image.at(h, w, 0), image.at(h, w, 1), image.at(h, w, 2)};
                auto it = cache.find(px);
                if (it == cache.end())
                {
                    int best = 0;
                    long best_d = -1;
                    for (int i = 0; i < levels; ++i)
                    {
                        long d = 0;
                        for (int c = 0; c < 3; ++c)
                        {
                            const long diff = static_cast<long>(px[static_cast<std::size_t>(c)]) - lut.at(0, i, c);
                            d += diff * diff;
                        }
                        if (best_d < 0 || d < best_d)
                        {
                            best_d = d;
                            best = i;
                        }
                    }
                    it = cache.emplace(px, ramp(0, best)).first;
                }
                out(h, w) = it->second;
            }
        return out;
    }

    CsiImage synth_image(const ExperimentConfig &cfg, int path_count, double snr_db, ImageEncoding encoding, std::uint64_t seed)
    {
        const auto h = synth_channel(sample_paths(ce_sampling(cfg, path_count), substream(seed, stream::paths)), cfg.m, cfg.n);
        const auto y = add_pilot_noise(h, snr_db, 1.0, substream(seed, stream::noise));
        const auto map = to_angular_delay(y, cfg.beta, cfg.gamma);
        switch (encoding)
        {
        case ImageEncoding::colormap:
            return encode_rgb_colormap(modulus_normalize(map).values);
        case ImageEncoding::two_channel_zero:
            return encode_two_channel_zero(map, static_cast<int>(map.height()), static_cast<int>(map.width())).image;
        case ImageEncoding::grayscale_rgb:
            break;
        }
        throw DomainError("grayscale images are built from modulus stacks, not single channels");
    }
}
