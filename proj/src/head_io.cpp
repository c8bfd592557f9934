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

#include "csivis/head_io.hpp"

#include "binary_io.hpp"

namespace csivis
{
    namespace
    {
        std::vector<std::uint8_t> serialize(HeadKind kind, const std::vector<const DenseLayer *> &layers)
        {
            detail::ByteWriter w;
            w.bytes("HEAD", 4);
            w.uint<std::uint16_t>(head_format_version);
            w.uint<std::uint8_t>(static_cast<std::uint8_t>(kind));
            w.uint<std::uint32_t>(static_cast<std::uint32_t>(layers.size()));
            for (const auto *l : layers)
            {
                w.uint<std::uint32_t>(static_cast<std::uint32_t>(l->inputs()));
                w.uint<std::uint32_t>(static_cast<std::uint32_t>(l->outputs()));
            }
            const auto flat = pack_layers(layers);
            for (Eigen::Index i = 0; i < flat.size(); ++i)
                w.f64(flat[i]);
            return std::move(w.data());
        }
    }

    std::vector<std::uint8_t> serialize_head(const DenseHeadParams &head)
    {
        return serialize(HeadKind::dense, head.layers());
    }

    std::vector<std::uint8_t> serialize_head(const LocHeadParams &head)
    {
        return serialize(HeadKind::loc, head.layers());
    }

    StoredHead deserialize_head(const std::vector<std::uint8_t> &bytes)
    {
        detail::ByteReader<HeadFormatError> r(bytes);
        if (r.text(4, "magic") != "HEAD")
            throw HeadFormatError("not a head file (bad magic)");
        const auto version = r.uint<std::uint16_t>("version");
        if (version != head_format_version)
            throw HeadFormatError("unsupported head format version " + std::to_string(version));
        const auto kind = r.uint<std::uint8_t>("kind");
        if (kind != 1 && kind != 2)
            throw HeadFormatError("unknown head kind " + std::to_string(kind));
        const auto count = r.uint<std::uint32_t>("layer count");
        r.need(static_cast<std::size_t>(count) * 8, "layer dimensions");
        StoredHead out;
        out.kind = static_cast<HeadKind>(kind);
        std::uint64_t total = 0;
        for (std::uint32_t i = 0; i < count; ++i)
        {
            const auto in = r.uint<std::uint32_t>("layer inputs");
            const auto outs = r.uint<std::uint32_t>("layer outputs");
            if (in == 0 || outs == 0)
                throw HeadFormatError("zero-sized layer");
            total += static_cast<std::uint64_t>(in) * outs + outs;
            out.layers.push_back(DenseLayer::zeros(in, outs));
        }
        if (total > r.remaining() / 8)
            throw HeadFormatError("truncated input while reading weights");
        std::vector<DenseLayer *> ptrs;
        for (auto &l : out.layers)
            ptrs.push_back(&l);
        Eigen::VectorXd flat(static_cast<Eigen::Index>(total));
        for (Eigen::Index i = 0; i < flat.size(); ++i)
            flat[i] = r.f64("weights");
        if (r.remaining() != 0)
            throw HeadFormatError("trailing bytes after weights");
        unpack_layers(ptrs, flat);
        return out;
    }

    DenseHeadParams StoredHead::as_dense() const
    {
        if (kind != HeadKind::dense || layers.size() != 1)
            throw HeadFormatError("stored head is not a dense classification head");
        return {layers[0]};
    }

    LocHeadParams StoredHead::as_loc() const
    {
        if (kind != HeadKind::loc || layers.size() != 4)
            throw HeadFormatError("stored head is not a localization head");
        const auto k = layers[1].inputs() - 8;
        const auto ref = LocHeadParams::zeros(std::max<Eigen::Index>(k, 1));
        const auto ref_layers = ref.layers();
        for (std::size_t i = 0; i < 4; ++i)
            if (layers[i].inputs() != ref_layers[i]->inputs() || layers[i].outputs() != ref_layers[i]->outputs())
                throw HeadFormatError("localization head layer shapes are inconsistent");
        return {layers[0], layers[1], layers[2], layers[3]};
    }

    void save_head(const std::filesystem::path &path, const DenseHeadParams &head)
    {
        detail::write_file(path, serialize_head(head));
    }

    void save_head(const std::filesystem::path &path, const LocHeadParams &head)
    {
        detail::write_file(path, serialize_head(head));
    }

    StoredHead load_head(const std::filesystem::path &path)
    {
        return deserialize_head(detail::read_file(path));
    }
}
