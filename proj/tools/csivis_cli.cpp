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

#include "csivis/config.hpp"
#include "csivis/datasets.hpp"
#include "csivis/detection.hpp"
#include "csivis/features_io.hpp"
#include "csivis/harness.hpp"
#include "csivis/head_io.hpp"
#include "csivis/imaging.hpp"
#include "csivis/plot.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace
{
    enum ExitCode
    {
        exit_ok = 0,
        exit_config = 2,
        exit_runtime = 3,
        exit_detection = 4
    };

    struct GlobalOptions
    {
        std::string config;
        std::vector<std::string> overrides;
        std::optional<std::uint64_t> seed;
        std::string out;
        std::string detector;
        std::string endpoint;
        std::string prompt;
        std::optional<int> workers;
    };

    csivis::ExperimentConfig build_config(const GlobalOptions &g)
    {
        csivis::ExperimentConfig cfg = g.config.empty() ? csivis::ExperimentConfig{} : csivis::load_config(g.config);
        for (const auto &item : g.overrides)
        {
            const auto eq = item.find('=');
            if (eq == std::string::npos)
                throw csivis::ConfigError("--set expects key=value, got '" + item + "'");
            csivis::set_config_value(cfg, item.substr(0, eq), item.substr(eq + 1));
        }
        if (g.seed)
            cfg.master_seed = *g.seed;
        if (!g.detector.empty())
            csivis::set_config_value(cfg, "detector", g.detector);
        if (!g.endpoint.empty())
            cfg.endpoint = g.endpoint;
        if (!g.prompt.empty())
            cfg.prompt = g.prompt;
        if (g.workers)
            csivis::set_config_value(cfg, "workers", std::to_string(*g.workers));
        if (!g.out.empty())
            cfg.output_dir = g.out;
        cfg.validate();
        return cfg;
    }

    void write_text(const fs::path &path, const std::string &text)
    {
        if (path.has_parent_path())
            fs::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        out << text;
        if (!out)
            throw std::runtime_error("cannot write " + path.string());
    }

    nlohmann::json detections_json(const std::vector<csivis::Detection> &dets)
    {
        auto arr = nlohmann::json::array();
        for (const auto &d : dets)
            arr.push_back({{"box", {d.box.x0, d.box.y0, d.box.x1, d.box.y1}},
                           {"center", {d.center_w, d.center_h}},
                           {"score", d.confidence}});
        return arr;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"csivis: channel state information as images"};
    app.require_subcommand(1);
    app.fallthrough();
    GlobalOptions g;
    app.add_option("--config", g.config, "configuration file (key = value lines)")->check(CLI::ExistingFile);
    app.add_option("--set", g.overrides, "override a configuration key, key=value");
    app.add_option("--seed", g.seed, "master seed");
    app.add_option("--out", g.out, "output directory, or output file for single-artifact commands");
    app.add_option("--detector", g.detector, "builtin or external");
    app.add_option("--endpoint", g.endpoint, "external detection service URL");
    app.add_option("--prompt", g.prompt, "text prompt sent to the detection service");
    app.add_option("--workers", g.workers, "worker threads");

    auto *ce = app.add_subcommand("ce-sweep", "channel-estimation sweep (pipeline, LMMSE, LS)");
    auto *har = app.add_subcommand("har-train", "train the activity-recognition head");
    auto *loc = app.add_subcommand("loc-train", "train the localization heads");

    auto *encode = app.add_subcommand("encode-image", "render a synthetic channel as a PNG");
    int enc_paths = 4;
    double enc_snr = 10.0;
    std::string enc_encoding = "colormap";
    encode->add_option("--paths", enc_paths, "number of paths")->check(CLI::PositiveNumber);
    encode->add_option("--snr", enc_snr, "SNR in dB");
    encode->add_option("--encoding", enc_encoding, "colormap or two_channel_zero");

    auto *detect = app.add_subcommand("detect", "detect bright spots in an encoded image");
    std::string detect_image;
    detect->add_option("image", detect_image, "PNG image")->required()->check(CLI::ExistingFile);

    auto *extract = app.add_subcommand("extract-mock", "deterministic mock feature extraction");
    std::vector<std::string> extract_images;
    int extract_k = 768;
    extract->add_option("images", extract_images, "PNG images of equal size")->required()->check(CLI::ExistingFile);
    extract->add_option("--k", extract_k, "feature dimension")->check(CLI::PositiveNumber);

    auto *plot = app.add_subcommand("plot", "render a results CSV as SVG");
    std::string plot_input, plot_kind = "auto";
    plot->add_option("csv", plot_input, "results CSV")->required()->check(CLI::ExistingFile);
    plot->add_option("--kind", plot_kind, "auto, ce, har or loc");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try
    {
        const auto cfg = build_config(g);
        const fs::path dir = cfg.output_dir;

        if (*ce)
        {
            const auto result = csivis::run_ce_sweep(cfg);
            write_text(dir / "ce_sweep.csv", result.csv);
            std::cout << (dir / "ce_sweep.csv").string() << "\n";
        }
        else if (*har)
        {
            const auto result = csivis::run_har(cfg);
            fs::create_directories(dir);
            write_text(dir / "har.csv", result.csv);
            csivis::save_head(dir / "har_head.bin", result.head);
            if (cfg.har_features.empty())
            {
                csivis::write_features(dir / "har_features.fvec", result.features);
                csivis::write_manifest(dir / "har_manifest.jsonl", result.manifest);
            }
            std::cout << "test accuracy " << result.test_accuracy << ", " << result.param_count << " parameters\n";
        }
        else if (*loc)
        {
            const auto result = csivis::run_loc(cfg);
            fs::create_directories(dir);
            write_text(dir / "loc.csv", result.csv);
            csivis::save_head(dir / "loc_head.bin", result.head);
            for (const auto &s : result.summaries)
                std::cout << s.method << " snr " << s.snr_db << " dB: mean error " << s.mean_error_m << " m\n";
        }
        else if (*encode)
        {
            const auto encoding = csivis::parse_encoding(enc_encoding);
            const auto image = csivis::synth_image(cfg, enc_paths, enc_snr, encoding, cfg.master_seed);
            const fs::path path = g.out.empty() ? fs::path("channel.png") : fs::path(g.out);
            if (path.has_parent_path())
                fs::create_directories(path.parent_path());
            csivis::write_png(image, path);
            std::cout << path.string() << "\n";
        }
        else if (*detect)
        {
            const auto image = csivis::read_png(detect_image);
            std::vector<csivis::Detection> dets;
            if (cfg.detector == "external")
                dets = csivis::detect_external(image, cfg.prompt, cfg.endpoint, std::chrono::milliseconds(cfg.detector_timeout_ms));
            else
                dets = csivis::detect_peaks_builtin(csivis::image_intensity(image),
                                                    csivis::PeakDetectorConfig::for_oversampling(cfg.beta, cfg.gamma));
            std::cout << detections_json(dets).dump() << "\n";
        }
        else if (*extract)
        {
            std::vector<csivis::CsiImage> images;
            for (const auto &p : extract_images)
                images.push_back(csivis::read_png(p));
            for (const auto &im : images)
                if (im.pixels.size() != images.front().pixels.size())
                    throw std::invalid_argument("extract-mock needs images of equal size");
            const csivis::MockExtractor extractor(images.front().pixels.size(), extract_k, cfg.master_seed);
            csivis::FeatureTable table;
            table.rows = extractor.extract_batch(images).cast<float>();
            table.source_id = extractor.source_id();
            const fs::path path = g.out.empty() ? fs::path("features.fvec") : fs::path(g.out);
            if (path.has_parent_path())
                fs::create_directories(path.parent_path());
            csivis::write_features(path, table);
            std::string index;
            for (std::size_t i = 0; i < extract_images.size(); ++i)
                index += nlohmann::json{{"row", i}, {"image", extract_images[i]}}.dump() + "\n";
            write_text(fs::path(path).replace_extension(".index.jsonl"), index);
            std::cout << path.string() << "\n";
        }
        else if (*plot)
        {
            std::ifstream in(plot_input, std::ios::binary);
            const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            const auto svg = csivis::emit_plot(text, csivis::parse_plot_kind(plot_kind));
            if (g.out.empty())
                std::cout << svg;
            else
                write_text(g.out, svg);
        }
        return exit_ok;
    }
    catch (const csivis::ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    }
    catch (const csivis::DetectionServiceError &e)
    {
        std::cerr << "detection service error: " << e.what() << "\n";
        return exit_detection;
    }
    catch (const std::invalid_argument &e)
    {
        std::cerr << "invalid input: " << e.what() << "\n";
        return exit_config;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime;
    }
}
