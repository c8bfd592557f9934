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

#include "csivis/detection.hpp"

#include <algorithm>
#include <cmath>

namespace csivis
{
    PeakDetectorConfig PeakDetectorConfig::for_oversampling(int beta, int gamma)
    {
        PeakDetectorConfig cfg;
        cfg.suppression_radius_w = 2 * beta;
        cfg.suppression_radius_h = 2 * gamma;
        return cfg;
    }

    void PeakDetectorConfig::validate() const
    {
        if (!(threshold_ratio > 0.0 && threshold_ratio <= 1.0))
            throw DomainError("threshold_ratio must lie in (0, 1].");
        if (suppression_radius_w < 1 || suppression_radius_h < 1)
            throw DomainError("Suppression radii must be at least 1 pixel.");
        if (max_peaks < 1)
            throw DomainError("max_peaks must be at least 1.");
        if (known_count && *known_count < 1)
            throw DomainError("known_count must be positive when set.");
    }

    std::vector<Detection> detect_peaks_builtin(const Eigen::MatrixXd &norm, const PeakDetectorConfig &cfg)
    {
        cfg.validate();
        if (norm.size() == 0)
            throw DomainError("detect_peaks_builtin requires a non-empty matrix.");

        const Eigen::Index height = norm.rows();
        const Eigen::Index width = norm.cols();
        Eigen::MatrixXd work = norm;
        const double global_max = norm.maxCoeff();
        const std::size_t limit = static_cast<std::size_t>(cfg.known_count ? *cfg.known_count : cfg.max_peaks);

        std::vector<Detection> out;
        while (out.size() < limit)
        {
            // Row-major scan with strict comparison: ties resolve to the smallest (h, w).
            Eigen::Index best_h = 0;
            Eigen::Index best_w = 0;
            double best = work(0, 0);
            for (Eigen::Index h = 0; h < height; ++h)
                for (Eigen::Index w = 0; w < width; ++w)
                    if (work(h, w) > best)
                    {
                        best = work(h, w);
                        best_h = h;
                        best_w = w;
                    }

            if (!(best > 0.0))
                break;
            if (!cfg.known_count && best < cfg.threshold_ratio * global_max)
                break;

            Detection det;
            det.center_w = static_cast<double>(best_w);
            det.center_h = static_cast<double>(best_h);
            det.confidence = best;
            det.box.x0 = static_cast<double>(std::max<Eigen::Index>(0, best_w - cfg.suppression_radius_w));
            det.box.y0 = static_cast<double>(std::max<Eigen::Index>(0, best_h - cfg.suppression_radius_h));
            det.box.x1 = static_cast<double>(std::min<Eigen::Index>(width - 1, best_w + cfg.suppression_radius_w));
            det.box.y1 = static_cast<double>(std::min<Eigen::Index>(height - 1, best_h + cfg.suppression_radius_h));
            out.push_back(det);

            for (int dh = -cfg.suppression_radius_h; dh <= cfg.suppression_radius_h; ++dh)
            {
                const Eigen::Index h = ((best_h + dh) % height + height) % height;
                for (int dw = -cfg.suppression_radius_w; dw <= cfg.suppression_radius_w; ++dw)
                {
                    const Eigen::Index w = ((best_w + dw) % width + width) % width;
                    work(h, w) = 0.0;
                }
            }
        }
        return out;
    }

    DetectedPath bbox_to_path(const Detection &det, Eigen::Index beta_m, Eigen::Index gamma_n)
    {
        if (beta_m < 1 || gamma_n < 1)
            throw DomainError("Image dimensions must be positive.");
        if (!(det.center_w >= 0.0 && det.center_w < static_cast<double>(beta_m)) ||
            !(det.center_h >= 0.0 && det.center_h < static_cast<double>(gamma_n)))
            throw DomainError("Detection center lies outside the image.");

        DetectedPath p;
        double angle = 1.0 - det.center_w / static_cast<double>(beta_m);
        angle -= std::floor(angle);
        p.angle_hat = angle >= 1.0 ? 0.0 : angle;
        p.delay_hat = det.center_h / static_cast<double>(gamma_n);
        return p;
    }

    std::vector<DetectedPath> detections_to_paths(const std::vector<Detection> &dets, Eigen::Index beta_m, Eigen::Index gamma_n)
    {
        std::vector<DetectedPath> out;
        out.reserve(dets.size());
        for (const auto &d : dets)
            out.push_back(bbox_to_path(d, beta_m, gamma_n));
        return out;
    }
}
