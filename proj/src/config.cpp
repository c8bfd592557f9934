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

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace csivis
{
    namespace
    {
        std::string trim(const std::string &s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        }

        std::vector<std::string> split_list(const std::string &v)
        {
            std::vector<std::string> out;
            std::string item;
            std::istringstream in(v);
            while (std::getline(in, item, ','))
                out.push_back(trim(item));
            return out;
        }

        long long to_integer(const std::string &key, const std::string &v)
        {
            long long x = 0;
            const auto *end = v.data() + v.size();
            const auto r = std::from_chars(v.data(), end, x);
            if (v.empty() || r.ec != std::errc() || r.ptr != end)
                throw ConfigError("'" + key + "': expected an integer, got '" + v + "'");
            return x;
        }

        std::uint64_t to_unsigned(const std::string &key, const std::string &v)
        {
            std::uint64_t x = 0;
            const auto *end = v.data() + v.size();
            const auto r = std::from_chars(v.data(), end, x);
            if (v.empty() || r.ec != std::errc() || r.ptr != end)
                throw ConfigError("'" + key + "': expected a nonnegative integer, got '" + v + "'");
            return x;
        }

        int to_int(const std::string &key, const std::string &v)
        {
            const auto x = to_integer(key, v);
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
                throw ConfigError("'" + key + "': value out of range");
            return static_cast<int>(x);
        }

        double to_real(const std::string &key, const std::string &v)
        {
            double x = 0.0;
            const auto *end = v.data() + v.size();
            const auto r = std::from_chars(v.data(), end, x);
            if (v.empty() || r.ec != std::errc() || r.ptr != end || !std::isfinite(x))
                throw ConfigError("'" + key + "': expected a finite number, got '" + v + "'");
            return x;
        }

        bool to_bool(const std::string &key, const std::string &v)
        {
            if (v == "true" || v == "1" || v == "yes")
                return true;
            if (v == "false" || v == "0" || v == "no")
                return false;
            throw ConfigError("'" + key + "': expected true or false, got '" + v + "'");
        }

        std::string fmt(double v)
        {
            char buf[64];
            const auto r = std::to_chars(buf, buf + sizeof buf, v);
            return std::string(buf, r.ptr);
        }

        template <typename T, typename F>
        std::string join(const std::vector<T> &v, F f)
        {
            std::string out;
            for (std::size_t i = 0; i < v.size(); ++i)
                out += (i ? "," : "") + f(v[i]);
            return out;
        }

        struct Field
        {
            std::function<void(ExperimentConfig &, const std::string &key, const std::string &)> set;
            std::function<std::string(const ExperimentConfig &)> get;
            bool recorded = true;
        };

        Field int_field(int ExperimentConfig::*p)
        {
            return {[p](ExperimentConfig &c, const std::string &k, const std::string &v) { c.*p = to_int(k, v); },
                    [p](const ExperimentConfig &c) { return std::to_string(c.*p); }};
        }

        Field real_field(double ExperimentConfig::*p)
        {
            return {[p](ExperimentConfig &c, const std::string &k, const std::string &v) { c.*p = to_real(k, v); },
                    [p](const ExperimentConfig &c) { return fmt(c.*p); }};
        }

        Field bool_field(bool ExperimentConfig::*p)
        {
            return {[p](ExperimentConfig &c, const std::string &k, const std::string &v) { c.*p = to_bool(k, v); },
                    [p](const ExperimentConfig &c) { return std::string(c.*p ? "true" : "false"); }};
        }

        Field text_field(std::string ExperimentConfig::*p)
        {
            return {[p](ExperimentConfig &c, const std::string &, const std::string &v) { c.*p = v; },
                    [p](const ExperimentConfig &c) { return c.*p; }};
        }

        Field real_list_field(std::vector<double> ExperimentConfig::*p)
        {
            return {[p](ExperimentConfig &c, const std::string &k, const std::string &v)
                    {
                        std::vector<double> out;
                        for (const auto &item : split_list(v))
                            out.push_back(to_real(k, item));
                        c.*p = out;
                    },
                    [p](const ExperimentConfig &c) { return join(c.*p, fmt); }};
        }

        Field point_field(std::array<double, 3> ExperimentConfig::*p)
        {
            return {[p](ExperimentConfig &c, const std::string &k, const std::string &v)
                    {
                        const auto items = split_list(v);
                        if (items.size() != 3)
                            throw ConfigError("'" + k + "': expected three comma-separated coordinates");
                        for (std::size_t i = 0; i < 3; ++i)
                            (c.*p)[i] = to_real(k, items[i]);
                    },
                    [p](const ExperimentConfig &c) { return join(std::vector<double>((c.*p).begin(), (c.*p).end()), fmt); }};
        }

        template <typename T>
        Field train_field(TrainConfig ExperimentConfig::*tc, T TrainConfig::*p)
        {
            return {[tc, p](ExperimentConfig &c, const std::string &k, const std::string &v)
                    {
                        if constexpr (std::is_same_v<T, int>)
                            (c.*tc).*p = to_int(k, v);
                        else
                            (c.*tc).*p = to_real(k, v);
                    },
                    [tc, p](const ExperimentConfig &c)
                    {
                        if constexpr (std::is_same_v<T, int>)
                            return std::to_string((c.*tc).*p);
                        else
                            return fmt((c.*tc).*p);
                    }};
        }

        // Keys in the order they are recorded.
        const std::vector<std::pair<std::string, Field>> &fields()
        {
            static const std::vector<std::pair<std::string, Field>> table = []
            {
                std::vector<std::pair<std::string, Field>> t;
                t.emplace_back("task", text_field(&ExperimentConfig::task));
                t.emplace_back("m", int_field(&ExperimentConfig::m));
                t.emplace_back("n", int_field(&ExperimentConfig::n));
                t.emplace_back("beta", int_field(&ExperimentConfig::beta));
                t.emplace_back("gamma", int_field(&ExperimentConfig::gamma));
                t.emplace_back("path_counts",
                               Field{[](ExperimentConfig &c, const std::string &k, const std::string &v)
                                     {
                                         std::vector<int> out;
                                         for (const auto &item : split_list(v))
                                             out.push_back(to_int(k, item));
                                         c.path_counts = out;
                                     },
                                     [](const ExperimentConfig &c) { return join(c.path_counts, [](int x) { return std::to_string(x); }); }});
                t.emplace_back("snr_db_list", real_list_field(&ExperimentConfig::snr_db_list));
                t.emplace_back("trials", int_field(&ExperimentConfig::trials));
                t.emplace_back("master_seed",
                               Field{[](ExperimentConfig &c, const std::string &k, const std::string &v) { c.master_seed = to_unsigned(k, v); },
                                     [](const ExperimentConfig &c) { return std::to_string(c.master_seed); }});
                t.emplace_back("on_grid", bool_field(&ExperimentConfig::on_grid));
                t.emplace_back("known_count", bool_field(&ExperimentConfig::known_count));
                t.emplace_back("covariance_samples", int_field(&ExperimentConfig::covariance_samples));
                t.emplace_back("detector", text_field(&ExperimentConfig::detector));
                t.emplace_back("endpoint", text_field(&ExperimentConfig::endpoint));
                t.emplace_back("prompt", text_field(&ExperimentConfig::prompt));
                t.emplace_back("detector_timeout_ms", int_field(&ExperimentConfig::detector_timeout_ms));
                t.emplace_back("detector_in_flight", int_field(&ExperimentConfig::detector_in_flight));
                auto workers = int_field(&ExperimentConfig::workers);
                workers.recorded = false;
                t.emplace_back("workers", workers);
                auto out_dir = text_field(&ExperimentConfig::output_dir);
                out_dir.recorded = false;
                t.emplace_back("output_dir", out_dir);

                t.emplace_back("har.csv", text_field(&ExperimentConfig::har_csv));
                t.emplace_back("har.features", text_field(&ExperimentConfig::har_features));
                t.emplace_back("har.manifest", text_field(&ExperimentConfig::har_manifest));
                t.emplace_back("har.t", int_field(&ExperimentConfig::har_t));
                t.emplace_back("har.m", int_field(&ExperimentConfig::har_m));
                t.emplace_back("har.n", int_field(&ExperimentConfig::har_n));
                t.emplace_back("har.groups_per_class", int_field(&ExperimentConfig::har_groups_per_class));
                t.emplace_back("har.image_size", int_field(&ExperimentConfig::har_image_size));
                t.emplace_back("har.k", int_field(&ExperimentConfig::har_k));
                t.emplace_back("har.test_fraction", real_field(&ExperimentConfig::har_test_fraction));
                t.emplace_back("har.epochs", train_field(&ExperimentConfig::har_train, &TrainConfig::epochs));
                t.emplace_back("har.batch_size", train_field(&ExperimentConfig::har_train, &TrainConfig::batch_size));
                t.emplace_back("har.learning_rate", train_field(&ExperimentConfig::har_train, &TrainConfig::learning_rate));

                t.emplace_back("loc.m", int_field(&ExperimentConfig::loc_m));
                t.emplace_back("loc.n", int_field(&ExperimentConfig::loc_n));
                t.emplace_back("loc.beta", int_field(&ExperimentConfig::loc_beta));
                t.emplace_back("loc.gamma", int_field(&ExperimentConfig::loc_gamma));
                t.emplace_back("loc.samples", int_field(&ExperimentConfig::loc_samples));
                t.emplace_back("loc.paths_per_user", int_field(&ExperimentConfig::loc_paths_per_user));
                t.emplace_back("loc.k", int_field(&ExperimentConfig::loc_k));
                t.emplace_back("loc.image_size", int_field(&ExperimentConfig::loc_image_size));
                t.emplace_back("loc.test_fraction", real_field(&ExperimentConfig::loc_test_fraction));
                t.emplace_back("loc.radius", real_field(&ExperimentConfig::loc_radius));
                t.emplace_back("loc.center", point_field(&ExperimentConfig::loc_center));
                t.emplace_back("loc.bs", point_field(&ExperimentConfig::loc_bs));
                t.emplace_back("loc.snr_db_list", real_list_field(&ExperimentConfig::loc_snr_db_list));
                t.emplace_back("loc.conv_baseline", bool_field(&ExperimentConfig::loc_conv_baseline));
                t.emplace_back("loc.conv_epochs", int_field(&ExperimentConfig::loc_conv_epochs));
                t.emplace_back("loc.epochs", train_field(&ExperimentConfig::loc_train, &TrainConfig::epochs));
                t.emplace_back("loc.batch_size", train_field(&ExperimentConfig::loc_train, &TrainConfig::batch_size));
                t.emplace_back("loc.learning_rate", train_field(&ExperimentConfig::loc_train, &TrainConfig::learning_rate));

                t.emplace_back("train.adam_beta1",
                               Field{[](ExperimentConfig &c, const std::string &k, const std::string &v)
                                     { c.har_train.adam_beta1 = c.loc_train.adam_beta1 = to_real(k, v); },
                                     [](const ExperimentConfig &c) { return fmt(c.har_train.adam_beta1); }});
                t.emplace_back("train.adam_beta2",
                               Field{[](ExperimentConfig &c, const std::string &k, const std::string &v)
                                     { c.har_train.adam_beta2 = c.loc_train.adam_beta2 = to_real(k, v); },
                                     [](const ExperimentConfig &c) { return fmt(c.har_train.adam_beta2); }});
                t.emplace_back("train.adam_eps",
                               Field{[](ExperimentConfig &c, const std::string &k, const std::string &v)
                                     { c.har_train.adam_eps = c.loc_train.adam_eps = to_real(k, v); },
                                     [](const ExperimentConfig &c) { return fmt(c.har_train.adam_eps); }});
                return t;
            }();
            return table;
        }

        void require(bool ok, const std::string &msg)
        {
            if (!ok)
                throw ConfigError(msg);
        }
    }

    void set_config_value(ExperimentConfig &cfg, const std::string &key, const std::string &value)
    {
        for (const auto &[name, field] : fields())
            if (name == key)
            {
                field.set(cfg, key, trim(value));
                return;
            }
        throw ConfigError("unknown key '" + key + "'");
    }

    std::vector<std::string> config_keys()
    {
        std::vector<std::string> out;
        for (const auto &[name, field] : fields())
            out.push_back(name);
        return out;
    }

    ExperimentConfig parse_config(const std::string &text)
    {
        ExperimentConfig cfg;
        std::istringstream in(text);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line))
        {
            ++line_no;
            const auto hash = line.find('#');
            const auto body = trim(hash == std::string::npos ? line : line.substr(0, hash));
            if (body.empty())
                continue;
            const auto eq = body.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
            try
            {
                set_config_value(cfg, trim(body.substr(0, eq)), body.substr(eq + 1));
            }
            catch (const ConfigError &e)
            {
                throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
            }
        }
        return cfg;
    }

    ExperimentConfig load_config(const std::filesystem::path &path)
    {
        std::ifstream f(path);
        if (!f)
            throw ConfigError("cannot open config file " + path.string());
        std::stringstream buf;
        buf << f.rdbuf();
        return parse_config(buf.str());
    }

    std::vector<std::pair<std::string, std::string>> ExperimentConfig::resolved() const
    {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto &[name, field] : fields())
            if (field.recorded)
                out.emplace_back(name, field.get(*this));
        return out;
    }

    void ExperimentConfig::validate() const
    {
        require(task == "ce_sweep" || task == "har" || task == "loc", "'task' must be ce_sweep, har or loc");
        require(m >= 1 && n >= 1, "'m' and 'n' must be positive");
        require(beta >= 1 && gamma >= 1, "'beta' and 'gamma' must be positive");
        require(!path_counts.empty(), "'path_counts' must not be empty");
        for (const int l : path_counts)
            require(l >= 1 && static_cast<long long>(l) <= static_cast<long long>(m) * n, "'path_counts' entries must lie in [1, m n]");
        require(!snr_db_list.empty(), "'snr_db_list' must not be empty");
        require(trials >= 1, "'trials' must be positive");
        require(covariance_samples >= 2, "'covariance_samples' must be at least 2");
        require(detector == "builtin" || detector == "external", "'detector' must be builtin or external");
        require(detector_timeout_ms >= 1, "'detector_timeout_ms' must be positive");
        require(detector_in_flight >= 1, "'detector_in_flight' must be positive");
        require(workers >= 1, "'workers' must be positive");
        require(har_t >= 1 && har_m >= 1 && har_n >= 1, "'har.t', 'har.m', 'har.n' must be positive");
        require(har_groups_per_class >= 2, "'har.groups_per_class' must be at least 2");
        require(har_image_size >= 1, "'har.image_size' must be positive");
        require(har_k >= 1, "'har.k' must be positive");
        require(har_test_fraction > 0.0 && har_test_fraction < 1.0, "'har.test_fraction' must lie in (0, 1)");
        require(har_features.empty() == har_manifest.empty(), "'har.features' and 'har.manifest' must be given together");
        require(loc_m >= 1 && loc_n >= 1 && loc_beta >= 1 && loc_gamma >= 1, "localization grid sizes must be positive");
        require(loc_samples >= 10, "'loc.samples' must be at least 10");
        require(loc_paths_per_user >= 1, "'loc.paths_per_user' must be positive");
        require(loc_k >= 1, "'loc.k' must be positive");
        require(loc_image_size >= 2, "'loc.image_size' must be at least 2");
        require(loc_test_fraction > 0.0 && loc_test_fraction < 1.0, "'loc.test_fraction' must lie in (0, 1)");
        require(loc_radius > 0.0, "'loc.radius' must be positive");
        require(!loc_snr_db_list.empty(), "'loc.snr_db_list' must not be empty");
        require(loc_conv_epochs >= 1, "'loc.conv_epochs' must be positive");
        try
        {
            har_train.validate();
            loc_train.validate();
        }
        catch (const std::invalid_argument &e)
        {
            throw ConfigError(std::string("training settings: ") + e.what());
        }
    }
}
