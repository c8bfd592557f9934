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

#include "csivis/features_io.hpp"

#include "binary_io.hpp"
#include "csivis/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace csivis
{
    FeatureTable make_feature_table(const std::vector<FeatureVector> &vectors, std::uint32_t dim)
    {
        FeatureTable t;
        t.rows.resize(static_cast<Eigen::Index>(vectors.size()), dim);
        for (std::size_t i = 0; i < vectors.size(); ++i)
        {
            const auto &v = vectors[i];
            if (v.values.size() != static_cast<Eigen::Index>(dim))
                throw DomainError("feature vector " + std::to_string(i) + " has length " + std::to_string(v.values.size()) +
                                  ", expected " + std::to_string(dim));
            if (!v.values.allFinite())
                throw DomainError("feature vector " + std::to_string(i) + " is not finite");
            if (i == 0)
                t.source_id = v.source_id;
            else if (v.source_id != t.source_id)
                throw DomainError("feature vectors come from different extractors");
            t.rows.row(static_cast<Eigen::Index>(i)) = v.values.cast<float>().transpose();
        }
        return t;
    }

    std::vector<std::uint8_t> encode_features(const FeatureTable &table)
    {
        detail::ByteWriter w;
        w.bytes("FVEC", 4);
        w.uint<std::uint16_t>(feature_format_version);
        w.uint<std::uint32_t>(table.count());
        w.uint<std::uint32_t>(table.dim());
        for (Eigen::Index i = 0; i < table.rows.rows(); ++i)
            for (Eigen::Index j = 0; j < table.rows.cols(); ++j)
                w.f32(table.rows(i, j));
        w.uint<std::uint32_t>(static_cast<std::uint32_t>(table.source_id.size()));
        w.bytes(table.source_id.data(), table.source_id.size());
        return std::move(w.data());
    }

    FeatureTable decode_features(const std::vector<std::uint8_t> &bytes)
    {
        detail::ByteReader<FeatureTruncatedError> r(bytes);
        if (bytes.size() < 4 || r.text(4, "magic") != "FVEC")
            throw FeatureMagicError("not a feature file (bad magic)");
        const auto version = r.uint<std::uint16_t>("version");
        if (version != feature_format_version)
            throw FeatureVersionError("unsupported feature file version " + std::to_string(version));
        const auto count = r.uint<std::uint32_t>("count");
        const auto dim = r.uint<std::uint32_t>("dim");

        const std::uint64_t cells = static_cast<std::uint64_t>(count) * dim;
        if (cells > std::numeric_limits<std::uint64_t>::max() / 4 ||
            cells * 4 > static_cast<std::uint64_t>(std::numeric_limits<std::ptrdiff_t>::max()))
            throw FeatureDimOverflowError("count x dim overflows the payload size");
        if (cells * 4 > r.remaining())
            throw FeatureTruncatedError("payload declares " + std::to_string(cells * 4) + " bytes, " +
                                        std::to_string(r.remaining()) + " available");

        FeatureTable t;
        t.rows.resize(count, dim);
        for (std::uint32_t i = 0; i < count; ++i)
            for (std::uint32_t j = 0; j < dim; ++j)
                t.rows(i, j) = r.f32("payload");
        const auto len = r.uint<std::uint32_t>("source id length");
        t.source_id = r.text(len, "source id");
        if (r.remaining() != 0)
            throw FeatureFileError("trailing bytes after source id");
        return t;
    }

    void write_features(const std::filesystem::path &path, const FeatureTable &table)
    {
        detail::write_file(path, encode_features(table));
    }

    FeatureTable read_features(const std::filesystem::path &path)
    {
        return decode_features(detail::read_file(path));
    }

    std::string encode_manifest(const Manifest &m)
    {
        std::ostringstream out;
        nlohmann::ordered_json header;
        header["task"] = m.task == TaskKind::har ? "har" : "loc";
        header["dim"] = m.dim;
        header["classes"] = m.classes;
        out << header.dump() << '\n';
        for (const auto &row : m.rows)
        {
            nlohmann::ordered_json j;
            j["id"] = row.id;
            j["feature_row"] = row.feature_row;
            if (row.label)
                j["label"] = *row.label;
            if (row.position)
                j["position"] = {(*row.position)[0], (*row.position)[1]};
            if (row.power)
                j["power"] = *row.power;
            if (!row.split.empty())
                j["split"] = row.split;
            out << j.dump() << '\n';
        }
        return out.str();
    }

    Manifest decode_manifest(const std::string &text)
    {
        std::istringstream in(text);
        std::string line;
        int line_no = 0;
        Manifest m;
        bool have_header = false;
        while (std::getline(in, line))
        {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos)
                continue;
            const auto where = "manifest line " + std::to_string(line_no) + ": ";
            try
            {
                const auto j = nlohmann::json::parse(line);
                if (!have_header)
                {
                    const auto task = j.at("task").get<std::string>();
                    if (task != "har" && task != "loc")
                        throw ManifestError(where + "unknown task '" + task + "'");
                    m.task = task == "har" ? TaskKind::har : TaskKind::loc;
                    m.dim = j.at("dim").get<std::uint32_t>();
                    m.classes = j.value("classes", 0);
                    have_header = true;
                    continue;
                }
                ManifestRow row;
                row.id = j.at("id").get<std::string>();
                row.feature_row = j.at("feature_row").get<std::uint32_t>();
                if (j.contains("label"))
                    row.label = j.at("label").get<int>();
                if (j.contains("position"))
                {
                    const auto p = j.at("position").get<std::vector<double>>();
                    if (p.size() != 2)
                        throw ManifestError(where + "position must have two coordinates");
                    row.position = std::array<double, 2>{p[0], p[1]};
                }
                if (j.contains("power"))
                    row.power = j.at("power").get<double>();
                row.split = j.value("split", std::string());
                if (m.task == TaskKind::har)
                {
                    if (!row.label || *row.label < 0 || *row.label >= m.classes)
                        throw ManifestError(where + "label missing or out of range");
                }
                else if (!row.position || !std::isfinite((*row.position)[0]) || !std::isfinite((*row.position)[1]))
                    throw ManifestError(where + "position missing or not finite");
                m.rows.push_back(std::move(row));
            }
            catch (const nlohmann::json::exception &e)
            {
                throw ManifestError(where + e.what());
            }
        }
        if (!have_header)
            throw ManifestError("manifest has no header line");
        return m;
    }

    void write_manifest(const std::filesystem::path &path, const Manifest &manifest)
    {
        const auto text = encode_manifest(manifest);
        detail::write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
    }

    void validate_manifest(const Manifest &m, const FeatureTable &companion)
    {
        if (m.dim != companion.dim())
            throw ManifestError("manifest declares K = " + std::to_string(m.dim) + " but the feature file has K = " +
                                std::to_string(companion.dim()));
        for (const auto &row : m.rows)
            if (row.feature_row >= companion.count())
                throw ManifestError("row '" + row.id + "' references feature row " + std::to_string(row.feature_row) +
                                    " of " + std::to_string(companion.count()));
    }

    Manifest read_manifest(const std::filesystem::path &path, const FeatureTable &companion)
    {
        const auto bytes = detail::read_file(path);
        auto m = decode_manifest(std::string(bytes.begin(), bytes.end()));
        validate_manifest(m, companion);
        return m;
    }
}
