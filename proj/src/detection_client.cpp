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

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace csivis
{
    namespace
    {
        const char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

        struct Endpoint
        {
            std::string scheme_host_port;
            std::string base_path;
        };

        Endpoint split_endpoint(const std::string &endpoint)
        {
            const auto scheme_end = endpoint.find("://");
            const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
            const auto path_start = endpoint.find('/', host_start);
            Endpoint e;
            if (path_start == std::string::npos)
            {
                e.scheme_host_port = endpoint;
            }
            else
            {
                e.scheme_host_port = endpoint.substr(0, path_start);
                e.base_path = endpoint.substr(path_start);
                while (!e.base_path.empty() && e.base_path.back() == '/')
                    e.base_path.pop_back();
            }
            return e;
        }

        double box_coordinate(const nlohmann::json &v)
        {
            if (!v.is_number())
                throw MalformedDetectionResponse("bbox coordinates must be numbers");
            const double x = v.get<double>();
            if (!std::isfinite(x))
                throw MalformedDetectionResponse("bbox coordinates must be finite");
            return x;
        }
    }

    std::string base64_encode(const std::vector<std::uint8_t> &bytes)
    {
        std::string out;
        out.reserve((bytes.size() + 2) / 3 * 4);
        std::size_t i = 0;
        for (; i + 2 < bytes.size(); i += 3)
        {
            const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
            out.push_back(kAlphabet[(v >> 18) & 63]);
            out.push_back(kAlphabet[(v >> 12) & 63]);
            out.push_back(kAlphabet[(v >> 6) & 63]);
            out.push_back(kAlphabet[v & 63]);
        }
        if (i + 1 == bytes.size())
        {
            const std::uint32_t v = bytes[i] << 16;
            out.push_back(kAlphabet[(v >> 18) & 63]);
            out.push_back(kAlphabet[(v >> 12) & 63]);
            out += "==";
        }
        else if (i + 2 == bytes.size())
        {
            const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
            out.push_back(kAlphabet[(v >> 18) & 63]);
            out.push_back(kAlphabet[(v >> 12) & 63]);
            out.push_back(kAlphabet[(v >> 6) & 63]);
            out.push_back('=');
        }
        return out;
    }

    std::vector<std::uint8_t> base64_decode(const std::string &text)
    {
        int lookup[256];
        std::fill(std::begin(lookup), std::end(lookup), -1);
        for (int i = 0; i < 64; ++i)
            lookup[static_cast<unsigned char>(kAlphabet[i])] = i;

        std::vector<std::uint8_t> out;
        std::uint32_t acc = 0;
        int bits = 0;
        for (const char ch : text)
        {
            if (ch == '=')
                break;
            if (ch == '\n' || ch == '\r' || ch == ' ')
                continue;
            const int v = lookup[static_cast<unsigned char>(ch)];
            if (v < 0)
                throw std::invalid_argument("invalid base64 character");
            acc = (acc << 6) | static_cast<std::uint32_t>(v);
            bits += 6;
            if (bits >= 8)
            {
                bits -= 8;
                out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xff));
            }
        }
        return out;
    }

    std::vector<Detection> parse_detection_response(const std::string &body, int image_width, int image_height)
    {
        nlohmann::json doc;
        try
        {
            doc = nlohmann::json::parse(body);
        }
        catch (const nlohmann::json::parse_error &e)
        {
            throw MalformedDetectionResponse(std::string("response is not valid JSON: ") + e.what());
        }
        if (!doc.is_array())
            throw MalformedDetectionResponse("response must be a JSON array");
        if (doc.empty())
            throw EmptyDetectionsError("detection service returned no boxes");

        std::vector<Detection> out;
        out.reserve(doc.size());
        for (const auto &item : doc)
        {
            if (!item.is_object() || !item.contains("bbox") || !item.contains("score"))
                throw MalformedDetectionResponse("each detection needs 'bbox' and 'score'");
            const auto &bbox = item["bbox"];
            if (!bbox.is_array() || bbox.size() != 4)
                throw MalformedDetectionResponse("'bbox' must be an array of four numbers");
            if (!item["score"].is_number())
                throw MalformedDetectionResponse("'score' must be a number");

            Detection d;
            d.box = Box{box_coordinate(bbox[0]), box_coordinate(bbox[1]), box_coordinate(bbox[2]), box_coordinate(bbox[3])};
            d.confidence = item["score"].get<double>();
            if (d.box.x1 < d.box.x0 || d.box.y1 < d.box.y0)
                throw MalformedDetectionResponse("'bbox' corners are inverted");
            if (!(d.confidence >= 0.0 && d.confidence <= 1.0))
                throw MalformedDetectionResponse("'score' must lie in [0, 1]");
            d.center_w = 0.5 * (d.box.x0 + d.box.x1);
            d.center_h = 0.5 * (d.box.y0 + d.box.y1);
            if (d.center_w < 0.0 || d.center_w >= image_width || d.center_h < 0.0 || d.center_h >= image_height)
                throw MalformedDetectionResponse("box center lies outside the image");
            out.push_back(d);
        }
        std::stable_sort(out.begin(), out.end(), [](const Detection &a, const Detection &b) { return a.confidence > b.confidence; });
        return out;
    }

    DetectionClient::DetectionClient(ExternalDetectorConfig cfg) : cfg_(std::move(cfg))
    {
        if (cfg_.max_in_flight < 1)
            throw DomainError("max_in_flight must be at least 1.");
        if (cfg_.timeout.count() <= 0)
            throw DomainError("Detection timeout must be positive.");
    }

    std::vector<Detection> DetectionClient::request(const CsiImage &image, const std::string &request_id) const
    {
        const Endpoint ep = split_endpoint(cfg_.endpoint);
        nlohmann::json body;
        body["image"] = base64_encode(encode_png(image));
        body["prompt"] = cfg_.prompt;
        body["request_id"] = request_id;

        httplib::Client client(ep.scheme_host_port);
        if (!client.is_valid())
            throw DetectionTransportError("invalid detection endpoint '" + cfg_.endpoint + "'");
        client.set_connection_timeout(cfg_.timeout);
        client.set_read_timeout(cfg_.timeout);
        client.set_write_timeout(cfg_.timeout);

        const httplib::Headers headers{{"X-Request-Id", request_id}};
        auto res = client.Post(ep.base_path + "/detect", headers, body.dump(), "application/json");
        if (!res)
            throw DetectionTransportError("request " + request_id + " failed: " + httplib::to_string(res.error()));
        if (res->status < 200 || res->status >= 300)
            throw DetectionTransportError("request " + request_id + " returned HTTP " + std::to_string(res->status));
        return parse_detection_response(res->body, image.width, image.height);
    }

    std::vector<Detection> DetectionClient::detect(const CsiImage &image) const
    {
        return request(image, "req-0");
    }

    DetectionClient::BatchResult DetectionClient::detect_batch(const std::vector<CsiImage> &images) const
    {
        BatchResult result;
        result.detections.resize(images.size());
        result.errors.resize(images.size());

        std::atomic<std::size_t> next{0};
        const auto worker = [&]() {
            for (std::size_t i = next++; i < images.size(); i = next++)
            {
                try
                {
                    result.detections[i] = request(images[i], "req-" + std::to_string(i));
                }
                catch (const EmptyDetectionsError &e)
                {
                    result.errors[i] = std::string("empty: ") + e.what();
                }
                catch (const MalformedDetectionResponse &e)
                {
                    result.errors[i] = std::string("malformed: ") + e.what();
                }
                catch (const DetectionTransportError &e)
                {
                    result.errors[i] = std::string("transport: ") + e.what();
                }
            }
        };

        const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(cfg_.max_in_flight), images.size());
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(worker);
        for (auto &t : pool)
            t.join();
        return result;
    }

    std::vector<Detection> detect_external(const CsiImage &image, const std::string &prompt, const std::string &endpoint,
                                           std::chrono::milliseconds timeout)
    {
        ExternalDetectorConfig cfg;
        cfg.endpoint = endpoint;
        cfg.prompt = prompt;
        cfg.timeout = timeout;
        return DetectionClient(cfg).detect(image);
    }
}
