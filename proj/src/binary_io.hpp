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

#ifndef csivis_binary_io_H
#define csivis_binary_io_H

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace csivis::detail
{
    // Little-endian byte writer.
    class ByteWriter
    {
    public:
        void bytes(const void *p, std::size_t n)
        {
            const auto *b = static_cast<const std::uint8_t *>(p);
            out_.insert(out_.end(), b, b + n);
        }

        template <typename T>
        void uint(T v)
        {
            for (std::size_t i = 0; i < sizeof(T); ++i)
                out_.push_back(static_cast<std::uint8_t>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF));
        }

        void f32(float v)
        {
            std::uint32_t u;
            std::memcpy(&u, &v, 4);
            uint(u);
        }

        void f64(double v)
        {
            std::uint64_t u;
            std::memcpy(&u, &v, 8);
            uint(u);
        }

        std::vector<std::uint8_t> &data() { return out_; }

    private:
        std::vector<std::uint8_t> out_;
    };

    // Little-endian reader; `truncated` is invoked when fewer bytes remain than requested.
    template <typename TruncatedError>
    class ByteReader
    {
    public:
        explicit ByteReader(const std::vector<std::uint8_t> &in) : in_(in) {}

        std::size_t remaining() const { return in_.size() - pos_; }

        void need(std::size_t n, const char *what) const
        {
            if (remaining() < n)
                throw TruncatedError(std::string("truncated input while reading ") + what);
        }

        template <typename T>
        T uint(const char *what)
        {
            need(sizeof(T), what);
            std::uint64_t v = 0;
            for (std::size_t i = 0; i < sizeof(T); ++i)
                v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
            pos_ += sizeof(T);
            return static_cast<T>(v);
        }

        float f32(const char *what)
        {
            const auto u = uint<std::uint32_t>(what);
            float v;
            std::memcpy(&v, &u, 4);
            return v;
        }

        double f64(const char *what)
        {
            const auto u = uint<std::uint64_t>(what);
            double v;
            std::memcpy(&v, &u, 8);
            return v;
        }

        std::string text(std::size_t n, const char *what)
        {
            need(n, what);
            std::string s(reinterpret_cast<const char *>(in_.data() + pos_), n);
            pos_ += n;
            return s;
        }

    private:
        const std::vector<std::uint8_t> &in_;
        std::size_t pos_ = 0;
    };

    inline std::vector<std::uint8_t> read_file(const std::filesystem::path &path)
    {
        std::ifstream f(path, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot open " + path.string());
        return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
    }

    // Writes to a sibling temporary file and renames it into place.
    inline void write_file(const std::filesystem::path &path, const std::vector<std::uint8_t> &bytes)
    {
        const auto tmp = std::filesystem::path(path.string() + ".tmp");
        {
            std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
            if (!f)
                throw std::runtime_error("cannot write " + tmp.string());
            f.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
            if (!f)
                throw std::runtime_error("write failed for " + tmp.string());
        }
        std::filesystem::rename(tmp, path);
    }
}

#endif
