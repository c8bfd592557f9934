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

#include <catch2/catch_amalgamated.hpp>

#include "csivis/channel.hpp"
#include "csivis/detection.hpp"
#include "csivis/imaging.hpp"
#include "csivis/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace csivis;

namespace
{
    int circular_distance(int a, int b, int period)
    {
        const int d = std::abs(a - b) % period;
        return std::min(d, period - d);
    }
}

TEST_CASE("detect_peaks_builtin - isolated impulse")
{
    Eigen::MatrixXd img = Eigen::MatrixXd::Zero(32, 64);
    img(12, 40) = 1.0;
    const auto dets = detect_peaks_builtin(img, PeakDetectorConfig{});
    REQUIRE(dets.size() == 1);
    CHECK(dets[0].center_w == 40.0);
    CHECK(dets[0].center_h == 12.0);
    CHECK(dets[0].confidence == 1.0);
    CHECK(dets[0].box.x0 <= 40.0);
    CHECK(dets[0].box.x1 >= 40.0);
    CHECK(dets[0].box.y0 <= 12.0);
    CHECK(dets[0].box.y1 >= 12.0);
}

TEST_CASE("detect_peaks_builtin - two impulses in confidence order")
{
    Eigen::MatrixXd img = Eigen::MatrixXd::Zero(64, 64);
    img(5, 5) = 0.9;
    img(40, 30) = 1.0;
    PeakDetectorConfig cfg;
    cfg.threshold_ratio = 0.5;
    const auto dets = detect_peaks_builtin(img, cfg);
    REQUIRE(dets.size() == 2);
    CHECK(dets[0].center_w == 30.0);
    CHECK(dets[0].center_h == 40.0);
    CHECK(dets[1].center_w == 5.0);
    CHECK(dets[1].center_h == 5.0);
    CHECK(dets[0].confidence > dets[1].confidence);

    cfg.threshold_ratio = 0.95;
    CHECK(detect_peaks_builtin(img, cfg).size() == 1);
    cfg.threshold_ratio = 0.5;
    cfg.max_peaks = 1;
    CHECK(detect_peaks_builtin(img, cfg).size() == 1);
}

TEST_CASE("detect_peaks_builtin - ties, wrap-around suppression, known count")
{
    Eigen::MatrixXd img = Eigen::MatrixXd::Zero(20, 20);
    img(3, 7) = 1.0;
    img(3, 2) = 1.0;
    img(1, 15) = 1.0;
    PeakDetectorConfig cfg;
    cfg.suppression_radius_w = 1;
    cfg.suppression_radius_h = 1;
    const auto dets = detect_peaks_builtin(img, cfg);
    REQUIRE(dets.size() == 3);
    CHECK(dets[0].center_h == 1.0);
    CHECK(dets[1].center_h == 3.0);
    CHECK(dets[1].center_w == 2.0);
    CHECK(dets[2].center_w == 7.0);

    // Peaks at opposite edges are neighbours under circular distance.
    Eigen::MatrixXd edge = Eigen::MatrixXd::Zero(16, 16);
    edge(0, 0) = 1.0;
    edge(15, 15) = 0.8;
    PeakDetectorConfig wide;
    wide.suppression_radius_w = 2;
    wide.suppression_radius_h = 2;
    CHECK(detect_peaks_builtin(edge, wide).size() == 1);

    // known_count ignores the threshold but stops once the matrix is exhausted.
    Eigen::MatrixXd weak = Eigen::MatrixXd::Zero(32, 32);
    weak(2, 2) = 1.0;
    weak(20, 20) = 0.01;
    PeakDetectorConfig known;
    known.known_count = 5;
    CHECK(detect_peaks_builtin(weak, known).size() == 2);
    known.known_count = 1;
    CHECK(detect_peaks_builtin(weak, known).size() == 1);

    CHECK(detect_peaks_builtin(Eigen::MatrixXd::Zero(4, 4), PeakDetectorConfig{}).empty());
    CHECK_THROWS_AS(detect_peaks_builtin(Eigen::MatrixXd(), PeakDetectorConfig{}), DomainError);

    PeakDetectorConfig bad;
    bad.suppression_radius_w = 0;
    CHECK_THROWS_AS(detect_peaks_builtin(img, bad), DomainError);
    bad = PeakDetectorConfig{};
    bad.threshold_ratio = 0.0;
    CHECK_THROWS_AS(detect_peaks_builtin(img, bad), DomainError);
}

TEST_CASE("detect_peaks_builtin - suppression window and scale invariance on random images")
{
    Rng rng = make_rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial)
    {
        Eigen::MatrixXd img(40, 48);
        for (Eigen::Index i = 0; i < img.size(); ++i)
            img.data()[i] = u(rng);
        PeakDetectorConfig cfg;
        cfg.suppression_radius_w = 3;
        cfg.suppression_radius_h = 2;
        cfg.threshold_ratio = 0.3;
        const auto dets = detect_peaks_builtin(img, cfg);
        for (std::size_t i = 0; i < dets.size(); ++i)
            for (std::size_t j = i + 1; j < dets.size(); ++j)
            {
                const bool inside_w = circular_distance(static_cast<int>(dets[i].center_w), static_cast<int>(dets[j].center_w), 48) <= 3;
                const bool inside_h = circular_distance(static_cast<int>(dets[i].center_h), static_cast<int>(dets[j].center_h), 40) <= 2;
                CHECK_FALSE((inside_w && inside_h));
            }
        for (std::size_t i = 1; i < dets.size(); ++i)
            CHECK(dets[i - 1].confidence >= dets[i].confidence);

        const auto scaled = detect_peaks_builtin(Eigen::MatrixXd(0.37 * img), cfg);
        REQUIRE(scaled.size() == dets.size());
        for (std::size_t i = 0; i < dets.size(); ++i)
        {
            CHECK(scaled[i].center_w == dets[i].center_w);
            CHECK(scaled[i].center_h == dets[i].center_h);
        }
    }
}

TEST_CASE("bbox_to_path - examples and bounds")
{
    Detection d;
    d.center_w = 0.0;
    d.center_h = 0.0;
    auto p = bbox_to_path(d, 256, 256);
    CHECK(p.angle_hat == 0.0);
    CHECK(p.delay_hat == 0.0);

    d.center_w = 64.0;
    d.center_h = 128.0;
    p = bbox_to_path(d, 256, 256);
    CHECK(p.angle_hat == 0.75);
    CHECK(p.delay_hat == 0.5);

    d.center_w = 256.0;
    CHECK_THROWS_AS(bbox_to_path(d, 256, 256), DomainError);
    d.center_w = -1.0;
    CHECK_THROWS_AS(bbox_to_path(d, 256, 256), DomainError);
}

TEST_CASE("peak location followed by bbox_to_path is the identity on grid points")
{
    const int m = 16, n = 16, beta = 4, gamma = 4;
    for (int k = 0; k < beta * m; k += 3)
    {
        const int q = (7 * k + 5) % (gamma * n);
        const PathTriplet p{{0.8, -0.6}, static_cast<double>(k) / (beta * m), static_cast<double>(q) / (gamma * n)};
        const auto norm = modulus_normalize(to_angular_delay(synth_channel({p}, m, n), beta, gamma));
        PeakDetectorConfig cfg = PeakDetectorConfig::for_oversampling(beta, gamma);
        cfg.known_count = 1;
        const auto dets = detect_peaks_builtin(norm.values, cfg);
        REQUIRE(dets.size() == 1);
        const auto path = bbox_to_path(dets[0], beta * m, gamma * n);
        CHECK(path.angle_hat == p.angle);
        CHECK(path.delay_hat == p.delay);
    }
}

TEST_CASE("noiseless on-grid four-path image - exact bin recovery with known count")
{
    const int m = 32, n = 32, beta = 4, gamma = 4;
    const int bm = beta * m, gn = gamma * n;
    const std::vector<std::pair<int, int>> bins = {{10, 20}, {50, 70}, {90, 5}, {120, 110}};
    std::vector<PathTriplet> paths;
    Rng rng = make_rng(2);
    std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
    for (const auto &[k, q] : bins)
        paths.push_back({std::polar(0.5, phase(rng)), static_cast<double>(k) / bm, static_cast<double>(q) / gn});
    const auto norm = modulus_normalize(to_angular_delay(synth_channel(paths, m, n), beta, gamma));
    PeakDetectorConfig cfg = PeakDetectorConfig::for_oversampling(beta, gamma);
    cfg.known_count = 4;
    const auto dets = detect_peaks_builtin(norm.values, cfg);
    REQUIRE(dets.size() == 4);
    std::set<std::pair<double, double>> found, expected;
    for (const auto &d : dets)
    {
        const auto p = bbox_to_path(d, bm, gn);
        found.insert({p.angle_hat, p.delay_hat});
    }
    for (const auto &p : paths)
        expected.insert({p.angle, p.delay});
    CHECK(found == expected);
}

TEST_CASE("for_oversampling - default radii")
{
    const auto cfg = PeakDetectorConfig::for_oversampling(4, 3);
    CHECK(cfg.suppression_radius_w == 8);
    CHECK(cfg.suppression_radius_h == 6);
    CHECK(cfg.threshold_ratio == 0.2);
    CHECK(cfg.max_peaks == 20);
    CHECK_FALSE(cfg.known_count.has_value());
}

TEST_CASE("parse_detection_response - midpoints, order, error classes")
{
    auto one = parse_detection_response(R"([{"bbox": [0, 0, 10, 10], "score": 0.9}])", 64, 64);
    REQUIRE(one.size() == 1);
    CHECK(one[0].center_w == 5.0);
    CHECK(one[0].center_h == 5.0);
    CHECK(one[0].confidence == 0.9);

    auto two = parse_detection_response(
        R"([{"bbox": [0, 0, 4, 4], "score": 0.3}, {"bbox": [10, 20, 12, 22], "score": 0.8}])", 64, 64);
    REQUIRE(two.size() == 2);
    CHECK(two[0].confidence == 0.8);
    CHECK(two[0].center_w == 11.0);
    CHECK(two[0].center_h == 21.0);

    CHECK_THROWS_AS(parse_detection_response("[]", 64, 64), EmptyDetectionsError);
    CHECK_THROWS_AS(parse_detection_response("not json", 64, 64), MalformedDetectionResponse);
    CHECK_THROWS_AS(parse_detection_response(R"({"bbox": [0,0,1,1]})", 64, 64), MalformedDetectionResponse);
    CHECK_THROWS_AS(parse_detection_response(R"([{"bbox": [0,0,1], "score": 0.5}])", 64, 64), MalformedDetectionResponse);
    CHECK_THROWS_AS(parse_detection_response(R"([{"bbox": [0,0,1,1], "score": 1.5}])", 64, 64), MalformedDetectionResponse);
    CHECK_THROWS_AS(parse_detection_response(R"([{"bbox": [100,100,110,110], "score": 0.5}])", 64, 64), MalformedDetectionResponse);
}

TEST_CASE("base64 round trip")
{
    const std::vector<std::uint8_t> empty;
    CHECK(base64_encode(empty).empty());
    const std::string text = "any carnal pleas";
    const std::vector<std::uint8_t> bytes(text.begin(), text.end());
    CHECK(base64_encode(bytes) == "YW55IGNhcm5hbCBwbGVhcw==");
    CHECK(base64_decode(base64_encode(bytes)) == bytes);
    std::vector<std::uint8_t> all(256);
    for (int i = 0; i < 256; ++i)
        all[i] = static_cast<std::uint8_t>(i);
    CHECK(base64_decode(base64_encode(all)) == all);
}
