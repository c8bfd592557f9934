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

#include "csivis/config.hpp"
#include "csivis/features_io.hpp"
#include "csivis/harness.hpp"
#include "csivis/plot.hpp"
#include "stub_detection_server.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

using namespace csivis;
namespace fs = std::filesystem;

namespace
{
    ExperimentConfig small_ce()
    {
        ExperimentConfig cfg;
        cfg.m = 16;
        cfg.n = 16;
        cfg.path_counts = {4};
        cfg.snr_db_list = {0.0, 5.0, 10.0};
        cfg.trials = 12;
        cfg.covariance_samples = 100;
        return cfg;
    }

    ExperimentConfig small_har()
    {
        ExperimentConfig cfg;
        cfg.task = "har";
        cfg.har_t = 20;
        cfg.har_groups_per_class = 6;
        cfg.har_image_size = 16;
        cfg.har_k = 64;
        cfg.har_train.epochs = 20;
        cfg.har_train.batch_size = 16;
        cfg.har_train.learning_rate = 1e-2;
        return cfg;
    }

    ExperimentConfig small_loc()
    {
        ExperimentConfig cfg;
        cfg.task = "loc";
        cfg.loc_m = 8;
        cfg.loc_n = 8;
        cfg.loc_samples = 120;
        cfg.loc_k = 32;
        cfg.loc_image_size = 8;
        cfg.loc_train.epochs = 3;
        cfg.loc_train.batch_size = 32;
        return cfg;
    }

    std::string body(const std::string &csv)
    {
        std::string out, line;
        std::istringstream in(csv);
        while (std::getline(in, line))
            if (line.empty() || line[0] != '#')
                out += line + "\n";
        return out;
    }

    fs::path scratch(const std::string &name)
    {
        const auto dir = fs::temp_directory_path() / ("csivis_harness_" + name);
        fs::remove_all(dir);
        fs::create_directories(dir);
        return dir;
    }
}

TEST_CASE("config - defaults validate and resolve")
{
    const ExperimentConfig cfg;
    REQUIRE_NOTHROW(cfg.validate());
    const auto r = cfg.resolved();
    const auto has = [&](const std::string &k)
    { return std::any_of(r.begin(), r.end(), [&](const auto &kv) { return kv.first == k; }); };
    CHECK(has("m"));
    CHECK(has("har.k"));
    CHECK(has("loc.center"));
    CHECK_FALSE(has("workers"));
    CHECK_FALSE(has("output_dir"));
}

TEST_CASE("config - parsing, comments and round trip")
{
    const auto cfg = parse_config("# sweep\n"
                                  "m = 32   # antennas\n"
                                  "path_counts = 3, 5\n"
                                  "snr_db_list = -5,0.5\n"
                                  "\n"
                                  "on_grid = false\n"
                                  "loc.center = 10, 20, 1\n"
                                  "har.learning_rate = 0.01\n");
    CHECK(cfg.m == 32);
    CHECK(cfg.path_counts == std::vector<int>{3, 5});
    CHECK(cfg.snr_db_list == std::vector<double>{-5.0, 0.5});
    CHECK_FALSE(cfg.on_grid);
    CHECK(cfg.loc_center == std::array<double, 3>{10.0, 20.0, 1.0});
    CHECK(cfg.har_train.learning_rate == 0.01);

    std::string text;
    for (const auto &[k, v] : cfg.resolved())
        text += k + " = " + v + "\n";
    CHECK(parse_config(text).resolved() == cfg.resolved());
}

TEST_CASE("config - errors carry the line number")
{
    const auto message = [](const std::string &text)
    {
        try
        {
            parse_config(text);
        }
        catch (const ConfigError &e)
        {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message("m = 8\nfoo = 1\n").rfind("line 2: ", 0) == 0);
    CHECK(message("m = 8\n\nm 8\n").rfind("line 3: ", 0) == 0);
    CHECK(message("trials = many\n").rfind("line 1: ", 0) == 0);
    CHECK(message("on_grid = maybe\n").rfind("line 1: ", 0) == 0);
    CHECK_THROWS_AS(parse_config("trials = 0\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("detector = magic\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("path_counts = 300\nm = 16\nn = 16\n").validate(), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/csivis.cfg"), ConfigError);
}

TEST_CASE("parallel_for - every index once, lowest failing index rethrown")
{
    for (const int workers : {1, 2, 5})
    {
        std::vector<int> hits(100, 0);
        parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i] += 1; });
        CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
    try
    {
        parallel_for(50, 1, [](std::size_t i)
                     { if (i == 7 || i == 30) throw std::runtime_error(std::to_string(i)); });
        FAIL("expected an exception");
    }
    catch (const std::runtime_error &e)
    {
        CHECK(std::string(e.what()) == "7");
    }
    CHECK_THROWS_AS(parallel_for(3, 0, [](std::size_t) {}), std::invalid_argument);
}

TEST_CASE("ce sweep - grid shape and order")
{
    const auto result = run_ce_sweep(small_ce());
    REQUIRE(result.rows.size() == 9);
    const std::vector<std::string> methods{"pipeline", "lmmse", "ls"};
    for (std::size_t i = 0; i < result.rows.size(); ++i)
    {
        CHECK(result.rows[i].snr_db == small_ce().snr_db_list[i / 3]);
        CHECK(result.rows[i].method == methods[i % 3]);
        CHECK(result.rows[i].trials == 12);
        CHECK(result.rows[i].fallbacks == 0);
        CHECK(std::isfinite(result.rows[i].mean_nmse_db));
    }
    CHECK(result.csv.find("snr_db,path_count,method,mean_nmse_db,trials,fallbacks\n") != std::string::npos);
    CHECK(result.csv.find("# m = 16\n") != std::string::npos);
}

TEST_CASE("ce sweep - least squares tracks minus the SNR")
{
    auto cfg = small_ce();
    cfg.trials = 200;
    cfg.covariance_samples = 10;
    for (const auto &row : run_ce_sweep(cfg).rows)
        if (row.method == "ls")
            CHECK(std::abs(row.mean_nmse_db + row.snr_db) < 0.3);
}

TEST_CASE("ce sweep - results do not depend on the worker count")
{
    auto one = small_ce();
    auto three = small_ce();
    three.workers = 3;
    CHECK(run_ce_sweep(one).csv == run_ce_sweep(three).csv);
}

TEST_CASE("ce sweep - external detector failures fall back and are counted")
{
    csivis::testing::StubDetectionServer server;
    auto builtin = small_ce();
    builtin.snr_db_list = {10.0};
    auto external = builtin;
    external.detector = "external";
    external.endpoint = server.endpoint();
    external.prompt = "none";

    const auto a = run_ce_sweep(builtin);
    const auto b = run_ce_sweep(external);
    REQUIRE(b.rows.size() == 3);
    CHECK(b.rows[0].fallbacks == builtin.trials);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(b.rows[i].mean_nmse_db == a.rows[i].mean_nmse_db);
    CHECK(server.requests() == static_cast<std::size_t>(builtin.trials));

    external.prompt = "fail";
    CHECK(run_ce_sweep(external).rows[0].fallbacks == builtin.trials);
}

TEST_CASE("ce sweep - an answering external detector is used")
{
    csivis::testing::StubDetectionServer server;
    auto cfg = small_ce();
    cfg.snr_db_list = {20.0};
    cfg.detector = "external";
    cfg.endpoint = server.endpoint();
    const auto rows = run_ce_sweep(cfg).rows;
    auto builtin = cfg;
    builtin.detector = "builtin";
    CHECK(rows[0].fallbacks == 0);
    CHECK(server.requests() == static_cast<std::size_t>(cfg.trials));
    CHECK(rows[0].mean_nmse_db < -5.0);
    CHECK(rows[0].mean_nmse_db != run_ce_sweep(builtin).rows[0].mean_nmse_db);
}

TEST_CASE("har - parameter count, accuracy and determinism")
{
    auto cfg = small_har();
    const auto a = run_har(cfg);
    CHECK(a.param_count == 64 * 7 + 7);
    CHECK(a.rows.size() == 20);
    CHECK(a.rows.front().epoch == 1);
    CHECK(a.test_accuracy >= 0.9);
    CHECK(a.features.count() == 42);
    CHECK(a.manifest.rows.size() == 42);
    CHECK(run_har(cfg).csv == a.csv);

    cfg.har_k = 2048;
    cfg.har_train.epochs = 1;
    const auto big = run_har(cfg);
    CHECK(big.param_count == 14343);
    CHECK(big.csv.find("# param_count = 14343\n") != std::string::npos);
}

TEST_CASE("har - training from stored features reproduces the run")
{
    const auto dir = scratch("har");
    auto cfg = small_har();
    const auto first = run_har(cfg);
    write_features(dir / "f.fvec", first.features);
    write_manifest(dir / "m.jsonl", first.manifest);

    cfg.har_features = (dir / "f.fvec").string();
    cfg.har_manifest = (dir / "m.jsonl").string();
    const auto second = run_har(cfg);
    REQUIRE(second.rows.size() == first.rows.size());
    for (std::size_t i = 0; i < first.rows.size(); ++i)
    {
        CHECK(second.rows[i].train_loss == first.rows[i].train_loss);
        CHECK(second.rows[i].test_accuracy == first.rows[i].test_accuracy);
    }

    cfg.har_k = 65;
    CHECK_THROWS_AS(run_har(cfg), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("loc - methods, error bounds and determinism")
{
    const auto cfg = small_loc();
    const auto a = run_loc(cfg);
    REQUIRE(a.summaries.size() == 2);
    CHECK(a.summaries[0].method == "feature_head");
    CHECK(a.summaries[1].method == "no_feat_ext");
    CHECK(a.summaries[0].param_count == param_count(HeadDescriptor::loc(32)));
    CHECK(a.rows.size() == 6);
    for (const auto &s : a.summaries)
    {
        CHECK(s.mean_error_m >= 0.0);
        CHECK(s.mean_error_m <= 2.0 * std::sqrt(2.0) * cfg.loc_radius);
    }
    CHECK(run_loc(cfg).csv == a.csv);
    auto threaded = cfg;
    threaded.workers = 2;
    CHECK(run_loc(threaded).csv == a.csv);
}

TEST_CASE("image_intensity - inverts the colormap")
{
    Eigen::MatrixXd norm(4, 8);
    for (Eigen::Index i = 0; i < norm.size(); ++i)
        norm(i) = static_cast<double>(i) / static_cast<double>(norm.size() - 1);
    const auto back = image_intensity(encode_rgb_colormap(norm));
    CHECK((back - norm).cwiseAbs().maxCoeff() < 0.01);
}

TEST_CASE("plot - deterministic SVG with one series per method")
{
    const auto result = run_ce_sweep(small_ce());
    const auto svg = emit_plot(result.csv);
    CHECK(svg == emit_plot(result.csv, PlotKind::ce));
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(std::count(svg.begin(), svg.end(), '\n') > 10);
    std::size_t lines = 0;
    for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1))
        ++lines;
    CHECK(lines == 3);
    CHECK(svg.find("method=lmmse path_count=4") != std::string::npos);
}

TEST_CASE("plot - input errors")
{
    CHECK_THROWS_AS(emit_plot(""), PlotError);
    CHECK_THROWS_AS(emit_plot("# only comments\n"), PlotError);
    CHECK_THROWS_AS(emit_plot("epoch,train_loss,test_accuracy\n"), PlotError);
    CHECK_THROWS_AS(emit_plot("a,b\n1,2\n"), PlotError);
    try
    {
        emit_plot("# h\nepoch,train_loss,test_accuracy\n1,0.5,0.9\n2,0.4\n");
        FAIL("expected an exception");
    }
    catch (const PlotError &e)
    {
        CHECK(std::string(e.what()).rfind("line 4: ", 0) == 0);
    }
    CHECK_THROWS_WITH(emit_plot("epoch,train_loss,test_accuracy\n1,0.5,x\n"), Catch::Matchers::StartsWith("line 2: "));
    CHECK_THROWS_AS(parse_plot_kind("pie"), PlotError);
}

TEST_CASE("cli - exit codes")
{
    const auto dir = scratch("cli");
    const std::string cli = CSIVIS_CLI_PATH;
    const auto run = [&](const std::string &args)
    {
        const int status = std::system((cli + " " + args + " > " + (dir / "log.txt").string() + " 2>&1").c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    const auto out = dir.string();
    CHECK(run("--set m=8 --set n=8 --set trials=2 --set path_counts=2 --set covariance_samples=4 --out " + out + " ce-sweep") == 0);
    CHECK(fs::exists(dir / "ce_sweep.csv"));
    CHECK(run("plot " + (dir / "ce_sweep.csv").string() + " --out " + (dir / "p.svg").string()) == 0);
    CHECK(fs::exists(dir / "p.svg"));
    CHECK(run("--set m=8 --set n=8 --out " + (dir / "c.png").string() + " encode-image --paths 2") == 0);
    CHECK(run("--set m=8 --set n=8 detect " + (dir / "c.png").string()) == 0);
    CHECK(run("--out " + (dir / "f.fvec").string() + " extract-mock --k 4 " + (dir / "c.png").string()) == 0);
    CHECK(read_features(dir / "f.fvec").dim() == 4);
    CHECK(fs::exists(dir / "f.index.jsonl"));

    CHECK(run("--set bogus=1 ce-sweep") == 2);
    CHECK(run("no-such-command") == 2);
    CHECK(run("--detector external --endpoint http://127.0.0.1:1 detect " + (dir / "c.png").string()) == 4);
    {
        std::ofstream(dir / "junk.png") << "not a png";
    }
    CHECK(run("detect " + (dir / "junk.png").string()) == 3);
    fs::remove_all(dir);
}
