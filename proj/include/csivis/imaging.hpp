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

#ifndef csivis_imaging_H
#define csivis_imaging_H

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "csivis/channel.hpp"

namespace csivis
{
    // Oversampled angular-delay representation F_a^T Y F_d, size (beta M) x (gamma N).
    // Rows index the angle bin w, columns the delay bin h. Images built from it are
    // transposed: image rows are delay, image columns are angle.
    class AngularDelayMap
    {
    public:
        AngularDelayMap(Eigen::MatrixXcd entries, int beta, int gamma, Eigen::Index base_m, Eigen::Index base_n);

        const Eigen::MatrixXcd &entries() const { return entries_; }
        int beta() const { return beta_; }
        int gamma() const { return gamma_; }
        Eigen::Index base_m() const { return base_m_; }
        Eigen::Index base_n() const { return base_n_; }

        // Image-oriented sizes.
        Eigen::Index height() const { return entries_.cols(); } // gamma N, delay axis
        Eigen::Index width() const { return entries_.rows(); }  // beta M, angle axis
        cdouble pixel(Eigen::Index h, Eigen::Index w) const { return entries_(w, h); }

    private:
        Eigen::MatrixXcd entries_;
        int beta_;
        int gamma_;
        Eigen::Index base_m_;
        Eigen::Index base_n_;
    };

    struct NormRecord
    {
        double min = 0.0;
        double max = 0.0;
        bool degenerate() const { return !(max > min); }
    };

    enum class ImageEncoding
    {
        colormap,
        grayscale_rgb,
        two_channel_zero
    };

    std::string to_string(ImageEncoding e);
    ImageEncoding parse_encoding(const std::string &s);

    // 8-bit RGB image, interleaved row-major (h, w, channel).
    struct CsiImage
    {
        int height = 0;
        int width = 0;
        std::vector<std::uint8_t> pixels;
        NormRecord norm;
        ImageEncoding encoding = ImageEncoding::colormap;

        std::uint8_t at(int h, int w, int c) const { return pixels[(static_cast<std::size_t>(h) * width + w) * 3 + c]; }
        std::uint8_t &at(int h, int w, int c) { return pixels[(static_cast<std::size_t>(h) * width + w) * 3 + c]; }
    };

    // First `size` rows of an (oversample * size)-point DFT matrix, entry (r, c) = exp(-j 2 pi r c / (oversample size)).
    Eigen::MatrixXcd dft_basis(Eigen::Index size, int oversample);

    AngularDelayMap to_angular_delay(const Eigen::MatrixXcd &y, int beta, int gamma);
    AngularDelayMap to_angular_delay(const PilotObservation &y, int beta, int gamma);
    AngularDelayMap to_angular_delay(const ChannelMatrix &h, int beta, int gamma);

    struct NormalizedImage
    {
        Eigen::MatrixXd values; // (gamma N) x (beta M), rows = delay h, cols = angle w, in [0, 1]
        NormRecord norm;
    };

    // (|Y~| - min) / (max - min), image-oriented. A constant map yields all zeros.
    NormalizedImage modulus_normalize(const AngularDelayMap &map);

    // Min-max normalization of an arbitrary real matrix; zero output for a constant input.
    NormalizedImage min_max_normalize(const Eigen::MatrixXd &values);

    // Closed-form jet-style colormap; entries must lie in [0, 1].
    CsiImage encode_rgb_colormap(const Eigen::MatrixXd &norm);

    // Corner-aligned bilinear interpolation.
    Eigen::MatrixXd bilinear_resize(const Eigen::MatrixXd &in, Eigen::Index out_h, Eigen::Index out_w);

    // Real T x M x N tensor, row-major over (t, m, n).
    struct ModulusStack
    {
        int t = 0;
        int m = 0;
        int n = 0;
        std::vector<double> values;

        double at(int ti, int mi, int ni) const { return values[(static_cast<std::size_t>(ti) * m + mi) * n + ni]; }
    };

    // T x (M N) grayscale reshape (column index m N + n), min-max normalized, resized,
    // replicated into R, G and B.
    Eigen::MatrixXd reshape_grayscale(const ModulusStack &stack);
    CsiImage grayscale_reshape_resize(const ModulusStack &stack, int out_h, int out_w);

    struct TwoChannelImage
    {
        CsiImage image;
        double channel_power = 0.0; // ||Y~||^2 / (beta M gamma N), before normalization
    };

    // R = real part, G = imaginary part (shared min-max normalization), B = 0.
    TwoChannelImage encode_two_channel_zero(const AngularDelayMap &map, int out_h, int out_w);

    // Undo the recorded normalization of one channel: min + v/255 (max - min).
    Eigen::MatrixXd denormalize_channel(const CsiImage &image, int channel);

    // PNG codec (8-bit RGB, no alpha). Encoding id and norm record travel as tEXt chunks.
    std::vector<std::uint8_t> encode_png(const CsiImage &image);
    CsiImage decode_png(const std::vector<std::uint8_t> &bytes);
    void write_png(const CsiImage &image, const std::filesystem::path &path);
    CsiImage read_png(const std::filesystem::path &path);
}

#endif
