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

#ifndef csivis_features_io_H
#define csivis_features_io_H

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace csivis
{
    // Layout (little-endian): "FVEC", u16 version, u32 count, u32 dim, count x dim f32 row-major,
    // u32 source-id byte length, source-id UTF-8 bytes.
    inline constexpr std::uint16_t feature_format_version = 1;

    using FeatureRows = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    struct FeatureTable
    {
        FeatureRows rows; // count x dim
        std::string source_id;

        std::uint32_t count() const { return static_cast<std::uint32_t>(rows.rows()); }
        std::uint32_t dim() const { return static_cast<std::uint32_t>(rows.cols()); }

        // Rows widened to 64 bits for training.
        Eigen::MatrixXd as_double() const { return rows.cast<double>(); }
    };

    struct FeatureVector
    {
        Eigen::VectorXd values;
        std::string source_id;
        std::string sample_id;
    };

    class FeatureFileError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class FeatureMagicError : public FeatureFileError
    {
    public:
        using FeatureFileError::FeatureFileError;
    };

    class FeatureVersionError : public FeatureFileError
    {
    public:
        using FeatureFileError::FeatureFileError;
    };

    class FeatureTruncatedError : public FeatureFileError
    {
    public:
        using FeatureFileError::FeatureFileError;
    };

    // count x dim x 4 does not fit the addressable range.
    class FeatureDimOverflowError : public FeatureFileError
    {
    public:
        using FeatureFileError::FeatureFileError;
    };

    FeatureTable make_feature_table(const std::vector<FeatureVector> &vectors, std::uint32_t dim);

    std::vector<std::uint8_t> encode_features(const FeatureTable &table);
    FeatureTable decode_features(const std::vector<std::uint8_t> &bytes);
    void write_features(const std::filesystem::path &path, const FeatureTable &table);
    FeatureTable read_features(const std::filesystem::path &path);

    // JSON-lines manifest. First line: {"task": "har"|"loc", "dim": K, "classes": C}.
    // Following lines: {"id", "feature_row", "label"} for HAR or {"id", "feature_row", "position": [x, y], "power"}
    // for localization, each with an optional "split" ("train" / "test").
    enum class TaskKind
    {
        har,
        loc
    };

    struct ManifestRow
    {
        std::string id;
        std::uint32_t feature_row = 0;
        std::optional<int> label;
        std::optional<std::array<double, 2>> position;
        std::optional<double> power;
        std::string split;
    };

    struct Manifest
    {
        TaskKind task = TaskKind::har;
        std::uint32_t dim = 0;
        int classes = 0;
        std::vector<ManifestRow> rows;
    };

    class ManifestError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    std::string encode_manifest(const Manifest &manifest);
    Manifest decode_manifest(const std::string &text);
    void write_manifest(const std::filesystem::path &path, const Manifest &manifest);

    // Rejects rows pointing past the feature table and a K mismatch.
    Manifest read_manifest(const std::filesystem::path &path, const FeatureTable &companion);
    void validate_manifest(const Manifest &manifest, const FeatureTable &companion);
}

#endif
