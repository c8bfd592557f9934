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

#ifndef csivis_detection_H
#define csivis_detection_H

#include <Eigen/Dense>

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "csivis/imaging.hpp"

namespace csivis
{
    struct Box
    {
        double x0 = 0.0;
        double y0 = 0.0;
        double x1 = 0.0;
        double y1 = 0.0;
    };

    // A detected spot in image pixel coordinates (w = column/angle, h = row/delay).
    struct Detection
    {
        double center_w = 0.0;
        double center_h = 0.0;
        Box box;
        double confidence = 0.0;
    };

    struct DetectedPath
    {
        double angle_hat = 0.0;
        double delay_hat = 0.0;
    };

    struct PeakDetectorConfig
    {
        double threshold_ratio = 0.2;   // stop below this fraction of the global maximum
        int suppression_radius_w = 8;   // pixels, angle axis
        int suppression_radius_h = 8;   // pixels, delay axis
        int max_peaks = 20;
        std::optional<int> known_count; // overrides threshold and max_peaks

        // Radii of 2 beta / 2 gamma pixels: the oversampled Dirichlet mainlobe half-width.
        static PeakDetectorConfig for_oversampling(int beta, int gamma);
        void validate() const;
    };

    // Greedy peak picking with circular (wrap-around) suppression on both axes.
    //
    // Each step takes the global maximum of the working copy (ties: smallest h, then w),
    // records it, and zeroes the +-radius window around it. Stops when the maximum falls
    // below threshold_ratio times the original maximum, when max_peaks is reached, or
    // when the working copy is exhausted. With known_count the threshold and max_peaks
    // are ignored and at most known_count detections are returned.
    std::vector<Detection> detect_peaks_builtin(const Eigen::MatrixXd &norm, const PeakDetectorConfig &cfg);

    // theta = (1 - w/(beta M)) mod 1, T = h/(gamma N).
    DetectedPath bbox_to_path(const Detection &det, Eigen::Index beta_m, Eigen::Index gamma_n);

    std::vector<DetectedPath> detections_to_paths(const std::vector<Detection> &dets, Eigen::Index beta_m, Eigen::Index gamma_n);

    // ---------------------------------------------------------------------------------
    // External instruction-driven detection service.
    //
    // Wire protocol: POST {endpoint}/detect with a JSON body
    //   {"image": <base64 PNG>, "prompt": <text>, "request_id": <text>}
    // answered by a JSON array of {"bbox": [x0, y0, x1, y1], "score": s} in pixel
    // coordinates with the origin at the top-left corner.

    class DetectionServiceError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Connection refused, timeout, or a non-2xx status.
    class DetectionTransportError : public DetectionServiceError
    {
    public:
        using DetectionServiceError::DetectionServiceError;
    };

    // Body is not a JSON array of well-formed box objects.
    class MalformedDetectionResponse : public DetectionServiceError
    {
    public:
        using DetectionServiceError::DetectionServiceError;
    };

    // Well-formed but empty detection list.
    class EmptyDetectionsError : public DetectionServiceError
    {
    public:
        using DetectionServiceError::DetectionServiceError;
    };

    struct ExternalDetectorConfig
    {
        std::string endpoint = "http://127.0.0.1:8080";
        std::string prompt = "bright spot";
        std::chrono::milliseconds timeout{10000};
        int max_in_flight = 4;
    };

    // Parses a service response for an image of the given size; sorted by decreasing score.
    std::vector<Detection> parse_detection_response(const std::string &body, int image_width, int image_height);

    std::string base64_encode(const std::vector<std::uint8_t> &bytes);
    std::vector<std::uint8_t> base64_decode(const std::string &text);

    class DetectionClient
    {
    public:
        explicit DetectionClient(ExternalDetectorConfig cfg);

        std::vector<Detection> detect(const CsiImage &image) const;

        // One outcome per image, in input order; at most max_in_flight requests are open at once.
        struct BatchResult
        {
            std::vector<std::vector<Detection>> detections;
            std::vector<std::optional<std::string>> errors; // error class + message, per image
        };
        BatchResult detect_batch(const std::vector<CsiImage> &images) const;

        const ExternalDetectorConfig &config() const { return cfg_; }

    private:
        std::vector<Detection> request(const CsiImage &image, const std::string &request_id) const;

        ExternalDetectorConfig cfg_;
    };

    std::vector<Detection> detect_external(const CsiImage &image, const std::string &prompt, const std::string &endpoint,
                                           std::chrono::milliseconds timeout);
}

#endif
