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

#ifndef csivis_head_io_H
#define csivis_head_io_H

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "csivis/heads.hpp"

namespace csivis
{
    // Layout (little-endian): "HEAD", u16 version, u8 kind, u32 layer count, per layer u32 inputs and
    // u32 outputs, then per layer f64 weights row-major followed by f64 bias.
    inline constexpr std::uint16_t head_format_version = 1;

    enum class HeadKind : std::uint8_t
    {
        dense = 1,
        loc = 2
    };

    class HeadFormatError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    struct StoredHead
    {
        HeadKind kind = HeadKind::dense;
        std::vector<DenseLayer> layers;

        DenseHeadParams as_dense() const;
        LocHeadParams as_loc() const;
    };

    std::vector<std::uint8_t> serialize_head(const DenseHeadParams &head);
    std::vector<std::uint8_t> serialize_head(const LocHeadParams &head);
    StoredHead deserialize_head(const std::vector<std::uint8_t> &bytes);

    void save_head(const std::filesystem::path &path, const DenseHeadParams &head);
    void save_head(const std::filesystem::path &path, const LocHeadParams &head);
    StoredHead load_head(const std::filesystem::path &path);
}

#endif
