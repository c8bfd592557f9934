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

#ifndef csivis_harness_H
#define csivis_harness_H

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "csivis/config.hpp"
#include "csivis/features_io.hpp"
#include "csivis/heads.hpp"
#include "csivis/imaging.hpp"

namespace csivis
{
    // Runs task(i) for every i in [0, count) on at most `workers` threads. Tasks write into
    // index-addressed slots, so results do not depend on the worker count. The first exception
    // (lowest index) is rethrown after all workers stop.
    void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)> &task);

    // "# key = value" lines for every resolved setting.
    std::string csv_preamble(const ExperimentConfig &cfg);

    struct CeRow
    {
        double snr_db = 0.0;
        int path_count = 0;
        std::string method; // pipeline | lmmse | ls
        double mean_nmse_db = 0.0;
        int trials = 0;
        int fallbacks = 0; // external-detector failures replaced by the built-in detector
    };

    struct CeSweepResult
    {
        std::vector<CeRow> rows;
        std::string csv;
    };

    CeSweepResult run_ce_sweep(const ExperimentConfig &cfg);

    struct HarRow
    {
        int epoch = 0;
        double train_loss = 0.0;
        double test_accuracy = 0.0;
    };

    struct HarResult
    {
        std::vector<HarRow> rows;
        DenseHeadParams head;
        std::size_t param_count = 0;
        double train_accuracy = 0.0;
        double test_accuracy = 0.0;
        FeatureTable features;
        Manifest manifest;
        std::string csv;
    };

    HarResult run_har(const ExperimentConfig &cfg);

    struct LocRow
    {
        double snr_db = 0.0;
        std::string method; // feature_head | no_feat_ext | conv_feat_ext
        int epoch = 0;
        double train_loss = 0.0;
        double mean_error_m = 0.0;
    };

    struct LocSummary
    {
        double snr_db = 0.0;
        std::string method;
        double mean_error_m = 0.0;
        std::size_t param_count = 0;
    };

    struct LocResult
    {
        std::vector<LocRow> rows;
        std::vector<LocSummary> summaries;
        LocHeadParams head; // feature head trained at the last SNR
        std::string csv;
    };

    LocResult run_loc(const ExperimentConfig &cfg);

    // Recovers the normalized intensity in [0, 1] behind an encoded image: nearest colormap entry for
    // colormap images, the first channel otherwise.
    Eigen::MatrixXd image_intensity(const CsiImage &image);

    // Builds the angular-delay image of a synthetic channel drawn from the configuration.
    CsiImage synth_image(const ExperimentConfig &cfg, int path_count, double snr_db, ImageEncoding encoding, std::uint64_t seed);
}

#endif
