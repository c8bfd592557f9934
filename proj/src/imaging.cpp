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

#include <algorithm>
#include <cmath>
#include <numbers>

namespace csivis
{
    namespace
    {
        std::uint8_t quantize(double v)
        {
            return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
        }

        double clamp01(double x)
        {
            return std::clamp(x, 0.0, 1.0);
        }

        CsiImage blank_image(Eigen::Index h, Eigen::Index w, ImageEncoding encoding, NormRecord norm)
        {
            CsiImage img;
            img.height = static_cast<int>(h);
            img.width = static_cast<int>(w);
            img.pixels.assign(static_cast<std::size_t>(h * w * 3), 0);
            img.norm = norm;
            img.encoding = encoding;
            return img;
        }
    }

    AngularDelayMap::AngularDelayMap(Eigen::MatrixXcd entries, int beta, int gamma, Eigen::Index base_m, Eigen::Index base_n)
        : entries_(std::move(entries)), beta_(beta), gamma_(gamma), base_m_(base_m), base_n_(base_n)
    {
        if (beta < 1 || gamma < 1 || base_m < 1 || base_n < 1)
            throw DomainError("Angular-delay map factors and base dimensions must be positive.");
        if (entries_.rows() != beta * base_m || entries_.cols() != gamma * base_n)
            throw DomainError("Angular-delay map dimensions do not match beta M x gamma N.");
    }

    std::string to_string(ImageEncoding e)
    {
        switch (e)
        {
        case ImageEncoding::colormap:
            return "colormap";
        case ImageEncoding::grayscale_rgb:
            return "grayscale_rgb";
        case ImageEncoding::two_channel_zero:
            return "two_channel_zero";
        }
        return "colormap";
    }

    ImageEncoding parse_encoding(const std::string &s)
    {
        if (s == "colormap")
            return ImageEncoding::colormap;
        if (s == "grayscale_rgb")
            return ImageEncoding::grayscale_rgb;
        if (s == "two_channel_zero")
            return ImageEncoding::two_channel_zero;
        throw DomainError("Unknown image encoding '" + s + "'.");
    }

    Eigen::MatrixXcd dft_basis(Eigen::Index size, int oversample)
    {
        if (size < 1 || oversample < 1)
            throw DomainError("dft_basis requires size >= 1 and oversample >= 1.");
        const Eigen::Index cols = size * oversample;
        Eigen::MatrixXcd f(size, cols);
        for (Eigen::Index c = 0; c < cols; ++c)
            for (Eigen::Index r = 0; r < size; ++r)
            {
                // Reduce r c modulo the DFT length before forming the phase to keep it exact-ish.
                const auto k = (r * c) % cols;
                const double phase = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(cols);
                f(r, c) = k == 0 ? cdouble(1.0, 0.0) : std::polar(1.0, phase);
            }
        return f;
    }

    AngularDelayMap to_angular_delay(const Eigen::MatrixXcd &y, int beta, int gamma)
    {
        if (y.rows() < 1 || y.cols() < 1)
            throw DomainError("to_angular_delay requires a non-empty matrix.");
        if (beta < 1 || gamma < 1)
            throw DomainError("Oversampling factors must be positive.");
        const Eigen::MatrixXcd fa = dft_basis(y.rows(), beta);
        const Eigen::MatrixXcd fd = dft_basis(y.cols(), gamma);
        Eigen::MatrixXcd tmp = fa.transpose() * y;
        Eigen::MatrixXcd out = tmp * fd;
        return AngularDelayMap(std::move(out), beta, gamma, y.rows(), y.cols());
    }

    AngularDelayMap to_angular_delay(const PilotObservation &y, int beta, int gamma)
    {
        return to_angular_delay(y.entries(), beta, gamma);
    }

    AngularDelayMap to_angular_delay(const ChannelMatrix &h, int beta, int gamma)
    {
        return to_angular_delay(h.entries(), beta, gamma);
    }

    NormalizedImage min_max_normalize(const Eigen::MatrixXd &values)
    {
        if (values.size() == 0)
            throw DomainError("Cannot normalize an empty matrix.");
        NormalizedImage out;
        out.norm.min = values.minCoeff();
        out.norm.max = values.maxCoeff();
        if (out.norm.degenerate())
            out.values = Eigen::MatrixXd::Zero(values.rows(), values.cols());
        else
            out.values = ((values.array() - out.norm.min) / (out.norm.max - out.norm.min)).matrix();
        return out;
    }

    NormalizedImage modulus_normalize(const AngularDelayMap &map)
    {
        const Eigen::MatrixXd modulus = map.entries().cwiseAbs().transpose();
        return min_max_normalize(modulus);
    }

    CsiImage encode_rgb_colormap(const Eigen::MatrixXd &norm)
    {
        if (norm.size() == 0)
            throw DomainError("Cannot encode an empty matrix.");
        if (!norm.allFinite() || norm.minCoeff() < 0.0 || norm.maxCoeff() > 1.0)
            throw DomainError("Colormap input must lie in [0, 1].");

        CsiImage img = blank_image(norm.rows(), norm.cols(), ImageEncoding::colormap, NormRecord{0.0, 1.0});
        for (int h = 0; h < img.height; ++h)
            for (int w = 0; w < img.width; ++w)
            {
                const double x = norm(h, w);
                img.at(h, w, 0) = quantize(clamp01(1.5 - std::abs(4.0 * x - 3.0)));
                img.at(h, w, 1) = quantize(clamp01(1.5 - std::abs(4.0 * x - 2.0)));
                img.at(h, w, 2) = quantize(clamp01(1.5 - std::abs(4.0 * x - 1.0)));
            }
        return img;
    }

    Eigen::MatrixXd bilinear_resize(const Eigen::MatrixXd &in, Eigen::Index out_h, Eigen::Index out_w)
    {
        if (in.size() == 0 || out_h < 1 || out_w < 1)
            throw DomainError("bilinear_resize requires non-empty input and positive output size.");
        if (in.rows() == out_h && in.cols() == out_w)
            return in;

        const auto source = [](Eigen::Index dst, Eigen::Index out_len, Eigen::Index in_len) {
            if (out_len == 1 || in_len == 1)
                return 0.0;
            return static_cast<double>(dst) * static_cast<double>(in_len - 1) / static_cast<double>(out_len - 1);
        };

        Eigen::MatrixXd out(out_h, out_w);
        for (Eigen::Index r = 0; r < out_h; ++r)
        {
            const double sr = source(r, out_h, in.rows());
            const auto r0 = static_cast<Eigen::Index>(std::floor(sr));
            const auto r1 = std::min(r0 + 1, in.rows() - 1);
            const double fr = sr - static_cast<double>(r0);
            for (Eigen::Index c = 0; c < out_w; ++c)
            {
                const double sc = source(c, out_w, in.cols());
                const auto c0 = static_cast<Eigen::Index>(std::floor(sc));
                const auto c1 = std::min(c0 + 1, in.cols() - 1);
                const double fc = sc - static_cast<double>(c0);
                const double top = (1.0 - fc) * in(r0, c0) + fc * in(r0, c1);
                const double bottom = (1.0 - fc) * in(r1, c0) + fc * in(r1, c1);
                out(r, c) = (1.0 - fr) * top + fr * bottom;
            }
        }
        return out;
    }

    Eigen::MatrixXd reshape_grayscale(const ModulusStack &stack)
    {
        if (stack.t < 1 || stack.m < 1 || stack.n < 1)
            throw DomainError("Modulus stack dimensions must be positive.");
        if (stack.values.size() != static_cast<std::size_t>(stack.t) * stack.m * stack.n)
            throw DomainError("Modulus stack size does not match T x M x N.");
        Eigen::MatrixXd gray(stack.t, stack.m * stack.n);
        for (int t = 0; t < stack.t; ++t)
            for (int m = 0; m < stack.m; ++m)
                for (int n = 0; n < stack.n; ++n)
                    gray(t, m * stack.n + n) = stack.at(t, m, n);
        return gray;
    }

    CsiImage grayscale_reshape_resize(const ModulusStack &stack, int out_h, int out_w)
    {
        const NormalizedImage norm = min_max_normalize(reshape_grayscale(stack));
        const Eigen::MatrixXd resized = bilinear_resize(norm.values, out_h, out_w);
        CsiImage img = blank_image(out_h, out_w, ImageEncoding::grayscale_rgb, norm.norm);
        for (int h = 0; h < out_h; ++h)
            for (int w = 0; w < out_w; ++w)
            {
                const std::uint8_t v = quantize(resized(h, w));
                img.at(h, w, 0) = v;
                img.at(h, w, 1) = v;
                img.at(h, w, 2) = v;
            }
        return img;
    }

    TwoChannelImage encode_two_channel_zero(const AngularDelayMap &map, int out_h, int out_w)
    {
        const Eigen::MatrixXcd &y = map.entries();
        TwoChannelImage out;
        out.channel_power = y.squaredNorm() / static_cast<double>(y.size());

        const Eigen::MatrixXd re = y.real().transpose();
        const Eigen::MatrixXd im = y.imag().transpose();
        NormRecord norm{std::min(re.minCoeff(), im.minCoeff()), std::max(re.maxCoeff(), im.maxCoeff())};

        Eigen::MatrixXd re_n = Eigen::MatrixXd::Zero(re.rows(), re.cols());
        Eigen::MatrixXd im_n = Eigen::MatrixXd::Zero(im.rows(), im.cols());
        if (!norm.degenerate())
        {
            const double span = norm.max - norm.min;
            re_n = ((re.array() - norm.min) / span).matrix();
            im_n = ((im.array() - norm.min) / span).matrix();
        }
        re_n = bilinear_resize(re_n, out_h, out_w);
        im_n = bilinear_resize(im_n, out_h, out_w);

        out.image = blank_image(out_h, out_w, ImageEncoding::two_channel_zero, norm);
        for (int h = 0; h < out_h; ++h)
            for (int w = 0; w < out_w; ++w)
            {
                out.image.at(h, w, 0) = quantize(re_n(h, w));
                out.image.at(h, w, 1) = quantize(im_n(h, w));
            }
        return out;
    }

    Eigen::MatrixXd denormalize_channel(const CsiImage &image, int channel)
    {
        if (channel < 0 || channel > 2)
            throw DomainError("Channel index must be 0, 1 or 2.");
        Eigen::MatrixXd out(image.height, image.width);
        const double span = image.norm.max - image.norm.min;
        for (int h = 0; h < image.height; ++h)
            for (int w = 0; w < image.width; ++w)
                out(h, w) = image.norm.min + static_cast<double>(image.at(h, w, channel)) / 255.0 * span;
        return out;
    }
}
