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

// Acceptance suite: one PASS/FAIL line per criterion, each timed against its own limit.
// Exits nonzero when any criterion fails.

#include "csivis/channel.hpp"
#include "csivis/config.hpp"
#include "csivis/datasets.hpp"
#include "csivis/estimation.hpp"
#include "csivis/harness.hpp"
#include "csivis/heads.hpp"
#include "csivis/imaging.hpp"
#include "csivis/seeding.hpp"
#include "csivis/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

using namespace csivis;

namespace
{
    struct Outcome
    {
        bool ok = false;
        std::string detail;
    };

    int failures = 0;

    void criterion(const std::string &name, double limit_s, const std::function<Outcome()> &body)
    {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try
        {
            out = body();
        }
        catch (const std::exception &e)
        {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = elapsed < limit_s;
        const bool pass = out.ok && in_time;
        if (!pass)
            ++failures;
        std::printf("%s %-22s %s [%.2f s / limit %.0f s%s]\n", pass ? "PASS" : "FAIL", name.c_str(), out.detail.c_str(), elapsed,
                    limit_s, in_time ? "" : ", over time");
        std::fflush(stdout);
    }

    std::string fmt(const char *pattern, double a, double b = 0.0, double c = 0.0)
    {
        char buf[256];
        std::snprintf(buf, sizeof buf, pattern, a, b, c);
        return buf;
    }

    int circular_distance(int a, int b, int period)
    {
        const int d = std::abs(a - b) % period;
        return std::min(d, period - d);
    }

    Outcome ls_law()
    {
        ExperimentConfig cfg;
        cfg.m = 64;
        cfg.n = 64;
        cfg.path_counts = {10};
        cfg.snr_db_list = {0.0, 5.0, 10.0};
        cfg.trials = 500;
        double worst = 0.0;
        std::string detail;
        for (std::size_t si = 0; si < cfg.snr_db_list.size(); ++si)
        {
            const double snr = cfg.snr_db_list[si];
            const PathSampling sampling{10, cfg.m, cfg.n, true, cfg.beta, cfg.gamma};
            double acc = 0.0;
            for (int t = 0; t < cfg.trials; ++t)
            {
                const auto base = substream(trial_seed(cfg.master_seed, static_cast<std::uint64_t>(t)), 10);
                const auto h = synth_channel(sample_paths(sampling, substream(base, stream::paths)), cfg.m, cfg.n);
                const auto y = add_pilot_noise(h, snr, 1.0, substream(substream(base, si), stream::noise));
                acc += nmse(h, ls_estimate(y)).linear;
            }
            const double db = 10.0 * std::log10(acc / cfg.trials);
            worst = std::max(worst, std::abs(db + snr));
            detail += fmt("%g dB -> %.3f dB; ", snr, db);
        }
        return {worst <= 0.3, detail + fmt("max deviation %.3f dB (tol 0.3)", worst)};
    }

    Outcome exact_recovery()
    {
        const int m = 32, n = 32, beta = 4, gamma = 4;
        const int bm = beta * m, gn = gamma * n;
        Rng rng = make_rng(substream(7, stream::paths));
        std::uniform_int_distribution<int> kd(0, bm - 1), qd(0, gn - 1);
        std::uniform_real_distribution<double> mag(0.5, 1.0), phase(0.0, 2.0 * M_PI);
        double worst = -std::numeric_limits<double>::infinity();
        for (int trial = 0; trial < 50; ++trial)
        {
            const int l = 1 + trial % 4;
            std::vector<PathTriplet> paths;
            std::vector<std::pair<int, int>> cells;
            while (static_cast<int>(paths.size()) < l)
            {
                const int k = kd(rng), q = qd(rng);
                bool separated = true;
                for (const auto &[k2, q2] : cells)
                    separated = separated && circular_distance(k, k2, bm) >= 4 * beta && circular_distance(q, q2, gn) >= 4 * gamma;
                if (!separated)
                    continue;
                cells.emplace_back(k, q);
                paths.push_back({std::polar(mag(rng), phase(rng)), static_cast<double>(k) / bm, static_cast<double>(q) / gn});
            }
            const auto h = synth_channel(paths, m, n);
            auto det = PeakDetectorConfig::for_oversampling(beta, gamma);
            det.known_count = l;
            const auto est = detect_and_fit(add_pilot_noise(h, std::numeric_limits<double>::infinity(), 1.0, 0), beta, gamma, det);
            worst = std::max(worst, nmse(h, est.channel).db);
        }
        return {worst <= -80.0, fmt("worst NMSE over 50 trials %.1f dB (tol -80 dB)", worst)};
    }

    Outcome estimator_ordering()
    {
        ExperimentConfig cfg;
        cfg.path_counts = {10};
        cfg.snr_db_list = {0.0, 5.0, 10.0};
        cfg.trials = 50;
        cfg.on_grid = true;
        const auto rows = run_ce_sweep(cfg).rows;
        bool ordered = true;
        std::string detail;
        double gap0 = 0.0;
        for (std::size_t i = 0; i + 2 < rows.size(); i += 3)
        {
            const double p = rows[i].mean_nmse_db, lm = rows[i + 1].mean_nmse_db, ls = rows[i + 2].mean_nmse_db;
            ordered = ordered && p < lm && lm < ls;
            if (rows[i].snr_db == 0.0)
                gap0 = lm - p;
            detail += fmt("%g dB: %.2f < %.2f", rows[i].snr_db, p, lm) + fmt(" < %.2f; ", ls);
        }
        return {ordered && gap0 >= 6.0, detail + fmt("gap at 0 dB %.2f dB (tol 6)", gap0)};
    }

    Outcome peak_oracle()
    {
        const int m = 64, n = 64, beta = 4, gamma = 4;
        Rng rng = make_rng(substream(11, stream::paths));
        std::uniform_int_distribution<int> kd(0, beta * m - 1), qd(0, gamma * n - 1);
        std::normal_distribution<double> g;
        int misplaced = 0;
        double worst = 0.0;
        for (int trial = 0; trial < 200; ++trial)
        {
            const int k = kd(rng), q = qd(rng);
            const cdouble alpha(g(rng), g(rng));
            const PathTriplet p{alpha, static_cast<double>(k) / (beta * m), static_cast<double>(q) / (gamma * n)};
            const auto map = to_angular_delay(synth_channel({p}, m, n), beta, gamma);
            Eigen::Index w = 0, h = 0;
            const double peak = map.entries().cwiseAbs().maxCoeff(&w, &h);
            if (h != q || w != (beta * m - k) % (beta * m))
                ++misplaced;
            const double expect = m * n * std::abs(alpha);
            worst = std::max(worst, std::abs(peak - expect) / expect);
        }
        return {misplaced == 0 && worst <= 1e-8, fmt("%g misplaced of 200, max relative modulus error %.2e (tol 1e-8)", misplaced, worst)};
    }

    Outcome parameter_counts()
    {
        const std::vector<std::pair<int, std::size_t>> dense{{1000, 7007}, {4096, 28679}, {2048, 14343}, {768, 5383}, {1024, 7175}, {2048, 14343}};
        std::string detail;
        bool ok = true;
        for (const auto &[k, want] : dense)
        {
            const auto got = param_count(HeadDescriptor::dense(k, 7));
            ok = ok && got == want;
            detail += std::to_string(got) + " ";
        }
        const auto loc = param_count(HeadDescriptor::loc(1024));
        ok = ok && loc == 33634;
        return {ok, "dense " + detail + "loc " + std::to_string(loc)};
    }

    Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed)
    {
        Rng rng = make_rng(seed);
        std::normal_distribution<double> g;
        Eigen::MatrixXd out(rows, cols);
        for (Eigen::Index i = 0; i < out.size(); ++i)
            out(i) = g(rng);
        return out;
    }

    Outcome gradients()
    {
        double dense_worst = 0.0, loc_worst = 0.0;
        for (std::uint64_t seed = 0; seed < 100; ++seed)
        {
            const auto dense = DenseHeadParams::glorot(12, 7, seed);
            const Eigen::MatrixXd x = gaussian(5, 12, substream(seed, 1));
            std::vector<int> labels(5);
            for (std::size_t i = 0; i < labels.size(); ++i)
                labels[i] = static_cast<int>((seed + 3 * i) % 7);
            dense_worst = std::max(dense_worst, grad_check_dense(dense, x, labels).max_relative_error);

            const auto loc = LocHeadParams::glorot(32, seed);
            const Eigen::MatrixXd xl = gaussian(4, 32, substream(seed, 2));
            const Eigen::VectorXd pw = gaussian(4, 1, substream(seed, 3));
            const Eigen::MatrixXd t = (gaussian(4, 2, substream(seed, 4)).array() * 0.2 + 0.5).matrix();
            loc_worst = std::max(loc_worst, grad_check_loc(loc, xl, pw, t, 1.0, seed).max_relative_error);
        }
        return {dense_worst <= 1e-5 && loc_worst <= 1e-4,
                fmt("100 seeds: dense %.2e (tol 1e-5), loc %.2e (tol 1e-4)", dense_worst, loc_worst)};
    }

    Outcome convergence()
    {
        ExperimentConfig har;
        har.task = "har";
        har.har_train.epochs = 50;
        const auto h = run_har(har);

        ExperimentConfig loc;
        loc.task = "loc";
        const auto l = run_loc(loc);
        const double feature = l.summaries.at(0).mean_error_m, raw = l.summaries.at(1).mean_error_m;
        const double limit = 0.1 * 2.0 * loc.loc_radius;
        const bool ok = h.train_accuracy >= 0.99 && feature <= limit && feature < raw;
        return {ok, fmt("dense train accuracy %.4f (tol 0.99); ", h.train_accuracy) +
                        fmt("loc head %.2f m (tol %.1f m) vs NoFeatExt %.2f m", feature, limit, raw)};
    }

    Outcome determinism()
    {
        ExperimentConfig ce;
        ce.m = 32;
        ce.n = 32;
        ce.path_counts = {2, 6};
        ce.trials = 10;
        ce.covariance_samples = 50;

        ExperimentConfig har;
        har.task = "har";
        har.har_groups_per_class = 8;
        har.har_t = 50;
        har.har_k = 128;
        har.har_train.epochs = 5;

        ExperimentConfig loc;
        loc.task = "loc";
        loc.loc_samples = 200;
        loc.loc_image_size = 16;
        loc.loc_k = 64;
        loc.loc_train.epochs = 3;

        int identical = 0, total = 0;
        const auto check = [&](ExperimentConfig cfg, const std::function<std::string(const ExperimentConfig &)> &run)
        {
            cfg.workers = 1;
            const auto a = run(cfg);
            const auto b = run(cfg);
            cfg.workers = 4;
            const auto c = run(cfg);
            total += 2;
            identical += (a == b) + (a == c);
        };
        check(ce, [](const ExperimentConfig &c) { return run_ce_sweep(c).csv; });
        check(har, [](const ExperimentConfig &c) { return run_har(c).csv; });
        check(loc, [](const ExperimentConfig &c) { return run_loc(c).csv; });
        return {identical == total, fmt("%g of %g reruns byte-identical (workers 1 and 4)", identical, total)};
    }
}

int main()
{
    criterion("ls-baseline-law", 10.0, ls_law);
    criterion("exact-recovery", 5.0, exact_recovery);
    criterion("estimator-ordering", 60.0, estimator_ordering);
    criterion("peak-location-oracle", 5.0, peak_oracle);
    criterion("parameter-counts", 1.0, parameter_counts);
    criterion("gradient-correctness", 30.0, gradients);
    criterion("head-convergence", 120.0, convergence);
    criterion("determinism", 600.0, determinism);
    std::printf("%s: %d failing criteria\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
