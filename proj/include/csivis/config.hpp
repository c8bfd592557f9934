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

#ifndef csivis_config_H
#define csivis_config_H

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "csivis/training.hpp"

namespace csivis
{
    class ConfigError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    struct ExperimentConfig
    {
        std::string task = "ce_sweep"; // ce_sweep | har | loc

        // Channel-estimation sweep.
        int m = 64;
        int n = 64;
        int beta = 4;
        int gamma = 4;
        std::vector<int> path_counts{2, 4, 6, 8, 10};
        std::vector<double> snr_db_list{0.0, 5.0, 10.0};
        int trials = 50;
        std::uint64_t master_seed = 1;
        bool on_grid = true;
        bool known_count = true;
        int covariance_samples = 1000;

        // Path detector.
        std::string detector = "builtin"; // builtin | external
        std::string endpoint = "http://127.0.0.1:8080";
        std::string prompt = "bright spot";
        int detector_timeout_ms = 10000;
        int detector_in_flight = 4;

        // Execution.
        int workers = 1;
        std::string output_dir = "results";

        // Activity recognition.
        std::string har_csv;      // optional recording in the CSV ingestion format
        std::string har_features; // optional precomputed FeatureFile
        std::string har_manifest; // manifest companion of har_features
        int har_t = 250;
        int har_m = 3;
        int har_n = 30;
        int har_groups_per_class = 40;
        int har_image_size = 64;
        int har_k = 768;
        double har_test_fraction = 0.2;
        TrainConfig har_train{256, 200, 1e-3};

        // Localization.
        int loc_m = 16;
        int loc_n = 16;
        int loc_beta = 4;
        int loc_gamma = 4;
        int loc_samples = 2000;
        int loc_paths_per_user = 3;
        int loc_k = 1024;
        int loc_image_size = 56;
        double loc_test_fraction = 0.1;
        double loc_radius = 50.0;
        std::array<double, 3> loc_center{200.0, 50.0, 1.5};
        std::array<double, 3> loc_bs{0.0, 0.0, 25.0};
        std::vector<double> loc_snr_db_list{10.0};
        bool loc_conv_baseline = false;
        TrainConfig loc_train{128, 200, 1e-3};
        int loc_conv_epochs = 8;

        // Throws ConfigError naming the offending key.
        void validate() const;

        // Every experiment-defining key with its value, in a fixed order. Execution-only keys
        // (workers, output_dir) are left out so results do not depend on them.
        std::vector<std::pair<std::string, std::string>> resolved() const;
    };

    // Flat "key = value" lines; '#' starts a comment; lists are comma separated.
    ExperimentConfig parse_config(const std::string &text);
    ExperimentConfig load_config(const std::filesystem::path &path);

    // Sets one key from its text form.
    void set_config_value(ExperimentConfig &cfg, const std::string &key, const std::string &value);

    std::vector<std::string> config_keys();
}

#endif
