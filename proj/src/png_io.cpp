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

#include "csivis/imaging.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace csivis
{
    namespace
    {
        const char *const kEncodingKey = "csivis-encoding";
        const char *const kNormKey = "csivis-norm";

        struct ReadCursor
        {
            const std::vector<std::uint8_t> *bytes;
            std::size_t offset;
        };

        void write_to_vector(png_structp png, png_bytep data, png_size_t length)
        {
            auto *out = static_cast<std::vector<std::uint8_t> *>(png_get_io_ptr(png));
            out->insert(out->end(), data, data + length);
        }

        void flush_noop(png_structp) {}

        void read_from_vector(png_structp png, png_bytep data, png_size_t length)
        {
            auto *cursor = static_cast<ReadCursor *>(png_get_io_ptr(png));
            if (cursor->offset + length > cursor->bytes->size())
                png_error(png, "truncated PNG stream");
            std::memcpy(data, cursor->bytes->data() + cursor->offset, length);
            cursor->offset += length;
        }

        // libpng unwinds with longjmp; the message is stashed so the caller can rethrow.
        thread_local char g_png_message[256];

        [[noreturn]] void raise_error(png_structp png, png_const_charp message)
        {
            std::snprintf(g_png_message, sizeof(g_png_message), "%s", message);
            png_longjmp(png, 1);
        }

        void ignore_warning(png_structp, png_const_charp) {}
    }

    std::vector<std::uint8_t> encode_png(const CsiImage &image)
    {
        if (image.height < 1 || image.width < 1 ||
            image.pixels.size() != static_cast<std::size_t>(image.height) * image.width * 3)
            throw DomainError("Cannot encode an empty or inconsistent image as PNG.");

        std::vector<std::uint8_t> out;
        const std::string encoding = to_string(image.encoding);
        char norm[96];
        std::snprintf(norm, sizeof(norm), "%.17g %.17g", image.norm.min, image.norm.max);
        png_text text[2];
        std::memset(text, 0, sizeof(text));
        text[0].compression = PNG_TEXT_COMPRESSION_NONE;
        text[0].key = const_cast<char *>(kEncodingKey);
        text[0].text = const_cast<char *>(encoding.c_str());
        text[1].compression = PNG_TEXT_COMPRESSION_NONE;
        text[1].key = const_cast<char *>(kNormKey);
        text[1].text = norm;

        png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, raise_error, ignore_warning);
        png_infop info = png_create_info_struct(png);
        if (setjmp(png_jmpbuf(png)))
        {
            png_destroy_write_struct(&png, &info);
            throw std::runtime_error(std::string("PNG error: ") + g_png_message);
        }
        {
            png_set_write_fn(png, &out, write_to_vector, flush_noop);
            png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
                         PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
            png_set_text(png, info, text, 2);

            png_write_info(png, info);
            for (int r = 0; r < image.height; ++r)
            {
                auto *row = const_cast<png_bytep>(image.pixels.data() + static_cast<std::size_t>(r) * image.width * 3);
                png_write_row(png, row);
            }
            png_write_end(png, info);
        }
        png_destroy_write_struct(&png, &info);
        return out;
    }

    CsiImage decode_png(const std::vector<std::uint8_t> &bytes)
    {
        if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0)
            throw std::runtime_error("PNG error: missing PNG signature");

        CsiImage img;
        ReadCursor cursor{&bytes, 0};
        png_textp text = nullptr;
        int num_text = 0;
        png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, raise_error, ignore_warning);
        png_infop info = png_create_info_struct(png);
        if (setjmp(png_jmpbuf(png)))
        {
            png_destroy_read_struct(&png, &info, nullptr);
            throw std::runtime_error(std::string("PNG error: ") + g_png_message);
        }
        {
            png_set_read_fn(png, &cursor, read_from_vector);
            png_read_info(png, info);

            const png_byte color = png_get_color_type(png, info);
            const png_byte depth = png_get_bit_depth(png, info);
            if (depth == 16)
                png_set_strip_16(png);
            if (color == PNG_COLOR_TYPE_PALETTE)
                png_set_palette_to_rgb(png);
            if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
            {
                if (depth < 8)
                    png_set_expand_gray_1_2_4_to_8(png);
                png_set_gray_to_rgb(png);
            }
            if (color & PNG_COLOR_MASK_ALPHA)
                png_set_strip_alpha(png);
            png_read_update_info(png, info);

            img.width = static_cast<int>(png_get_image_width(png, info));
            img.height = static_cast<int>(png_get_image_height(png, info));
            if (png_get_rowbytes(png, info) != static_cast<std::size_t>(img.width) * 3)
                png_error(png, "unsupported pixel layout");
            img.pixels.resize(static_cast<std::size_t>(img.width) * img.height * 3);
            for (int r = 0; r < img.height; ++r)
                png_read_row(png, img.pixels.data() + static_cast<std::size_t>(r) * img.width * 3, nullptr);
            png_read_end(png, info);

            png_get_text(png, info, &text, &num_text);
        }

        std::string encoding_text;
        std::string norm_text;
        for (int i = 0; i < num_text; ++i)
        {
            if (std::strcmp(text[i].key, kEncodingKey) == 0)
                encoding_text = text[i].text;
            else if (std::strcmp(text[i].key, kNormKey) == 0)
                norm_text = text[i].text;
        }
        png_destroy_read_struct(&png, &info, nullptr);

        img.norm = NormRecord{0.0, 1.0};
        if (!encoding_text.empty())
            img.encoding = parse_encoding(encoding_text);
        if (!norm_text.empty())
            std::sscanf(norm_text.c_str(), "%lf %lf", &img.norm.min, &img.norm.max);
        return img;
    }

    void write_png(const CsiImage &image, const std::filesystem::path &path)
    {
        const auto bytes = encode_png(image);
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("Cannot open " + path.string() + " for writing.");
        out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }

    CsiImage read_png(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::runtime_error("Cannot open " + path.string() + " for reading.");
        std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        return decode_png(bytes);
    }
}
