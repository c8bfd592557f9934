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

#ifndef csivis_datasets_H
#define csivis_datasets_H

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "csivis/channel.hpp"
#include "csivis/features_io.hpp"
#include "csivis/imaging.hpp"

namespace csivis
{
    // Seeded random projection of the pixel buffer followed by tanh:
    // f_i = tanh(sum_j G(seed; i, j) x_j / sqrt(P)), x_j = pixel_j / 255, G standard normal.
    class MockExtractor
    {
    public:
        MockExtractor(std::size_t pixel_count, int k, std::uint64_t seed);

        Eigen::VectorXd extract(const CsiImage &image) const;
        Eigen::MatrixXd extract_batch(const std::vector<CsiImage> &images) const; // rows = images
        std::string source_id() const;
        int dim() const { return k_; }

    private:
        Eigen::MatrixXf projection_; // P x K
        int k_;
        std::uint64_t seed_;
    };

    FeatureVector mock_extract(const CsiImage &image, int k, std::uint64_t seed);

    struct LocScenario
    {
        std::array<double, 3> bs_position{0.0, 0.0, 25.0};
        std::array<double, 3> region_center{200.0, 50.0, 1.5};
        double region_radius = 50.0;
        int num_samples = 1000;

        void validate() const;

        // Farthest BS-user distance inside the region.
        double max_range() const;

        // BS-to-center distance; the LOS gain is 1 at this range.
        double reference_range() const;
    };

    // LOS path of a user at the given position: angle (0.5 sin(azimuth)) mod 1,
    // delay 0.8 range / max_range, real gain reference_range / range.
    PathTriplet los_path(const LocScenario &scenario, const std::array<double, 3> &user);

    struct LocSample
    {
        ChannelMatrix channel;
        std::array<double, 2> position;
        double channel_power = 0.0; // ||H||^2 / (M N)
    };

    // Users uniform on the disk; LOS path plus (paths_per_user - 1) scatter paths, each at -10 dB
    // relative to the LOS power with uniform angle and delay.
    std::vector<LocSample> gen_loc_dataset(const LocScenario &scenario, int paths_per_user, std::uint64_t seed,
                                           Eigen::Index m, Eigen::Index n);

    // Position normalization over the bounding square of the region.
    struct PositionScaler
    {
        double x0 = 0.0;
        double y0 = 0.0;
        double side = 1.0;

        static PositionScaler for_scenario(const LocScenario &scenario);
        std::array<double, 2> normalize(const std::array<double, 2> &p) const;
        std::array<double, 2> denormalize(const std::array<double, 2> &u) const;
    };

    struct HarGroup
    {
        ModulusStack modulus; // T x M x N
        int label = 0;
    };

    inline constexpr int har_num_classes = 7;

    class HarCsvError : public std::runtime_error
    {
    public:
        HarCsvError(std::size_t line, std::size_t column, const std::string &what);
        std::size_t line() const { return line_; }
        std::size_t column() const { return column_; }

    private:
        std::size_t line_;
        std::size_t column_;
    };

    // Format: per group, a header row "label,<c>" followed by T rows of M N comma-separated moduli.
    // Lines and columns in errors are 1-based.
    std::vector<HarGroup> parse_har_csv(const std::string &text, int t, int m, int n);
    std::vector<HarGroup> ingest_har_csv(const std::filesystem::path &path, int t, int m, int n);
    std::string format_har_csv(const std::vector<HarGroup> &groups);

    // Seven synthetic activity classes with distinct time-subcarrier gratings plus Gaussian jitter.
    std::vector<HarGroup> gen_har_synthetic(int groups_per_class, int t, int m, int n, std::uint64_t seed);
}

#endif
