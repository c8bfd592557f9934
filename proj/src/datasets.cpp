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

#include "csivis/datasets.hpp"

#include "binary_io.hpp"
#include "csivis/seeding.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace csivis
{
    MockExtractor::MockExtractor(std::size_t pixel_count, int k, std::uint64_t seed) : k_(k), seed_(seed)
    {
        if (k < 1)
            throw DomainError("mock extractor needs K >= 1");
        if (pixel_count == 0)
            throw DomainError("mock extractor needs a nonempty image");
        const auto p = static_cast<Eigen::Index>(pixel_count);
        projection_.resize(p, k);
        const float scale = static_cast<float>(1.0 / std::sqrt(static_cast<double>(pixel_count)));
        for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index j = 0; j < p; ++j)
                projection_(j, i) = static_cast<float>(hashed_normal(seed, (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(j))) * scale;
    }

    Eigen::MatrixXd MockExtractor::extract_batch(const std::vector<CsiImage> &images) const
    {
        Eigen::MatrixXf x(static_cast<Eigen::Index>(images.size()), projection_.rows());
        for (std::size_t s = 0; s < images.size(); ++s)
        {
            if (images[s].pixels.size() != static_cast<std::size_t>(projection_.rows()))
                throw DomainError("mock extractor: image has " + std::to_string(images[s].pixels.size()) +
                                  " values, expected " + std::to_string(projection_.rows()));
            for (std::size_t j = 0; j < images[s].pixels.size(); ++j)
                x(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j)) = static_cast<float>(images[s].pixels[j]) / 255.0f;
        }
        const Eigen::MatrixXf z = x * projection_;
        return z.cast<double>().array().tanh().matrix();
    }

    Eigen::VectorXd MockExtractor::extract(const CsiImage &image) const
    {
        return extract_batch({image}).row(0).transpose();
    }

    std::string MockExtractor::source_id() const
    {
        return "mock-projection:k=" + std::to_string(k_) + ":seed=" + std::to_string(seed_);
    }

    FeatureVector mock_extract(const CsiImage &image, int k, std::uint64_t seed)
    {
        MockExtractor ex(image.pixels.size(), k, seed);
        return {ex.extract(image), ex.source_id(), ""};
    }

    void LocScenario::validate() const
    {
        if (!(region_radius > 0.0) || !std::isfinite(region_radius))
            throw DomainError("region radius must be positive");
        if (num_samples < 1)
            throw DomainError("num_samples must be positive");
        for (const auto v : bs_position)
            if (!std::isfinite(v))
                throw DomainError("BS position must be finite");
        for (const auto v : region_center)
            if (!std::isfinite(v))
                throw DomainError("region center must be finite");
        if (reference_range() <= region_radius)
            throw DomainError("the BS must lie outside the user region");
    }

    double LocScenario::reference_range() const
    {
        const double dx = region_center[0] - bs_position[0];
        const double dy = region_center[1] - bs_position[1];
        const double dz = region_center[2] - bs_position[2];
        return std::sqrt(dx * dx + dy * dy + dz * dz);
    }

    double LocScenario::max_range() const
    {
        const double dxy = std::hypot(region_center[0] - bs_position[0], region_center[1] - bs_position[1]);
        const double dz = region_center[2] - bs_position[2];
        return std::sqrt((dxy + region_radius) * (dxy + region_radius) + dz * dz);
    }

    PathTriplet los_path(const LocScenario &s, const std::array<double, 3> &user)
    {
        const double dx = user[0] - s.bs_position[0];
        const double dy = user[1] - s.bs_position[1];
        const double dz = user[2] - s.bs_position[2];
        const double range = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (!(range > 0.0))
            throw DomainError("user coincides with the BS");
        double angle = std::fmod(0.5 * std::sin(std::atan2(dy, dx)), 1.0);
        if (angle < 0.0)
            angle += 1.0;
        if (angle >= 1.0)
            angle = 0.0;
        const double delay = std::min(0.8 * range / s.max_range(), 0.8);
        return {cdouble(s.reference_range() / range, 0.0), angle, delay};
    }

    std::vector<LocSample> gen_loc_dataset(const LocScenario &s, int paths_per_user, std::uint64_t seed, Eigen::Index m,
                                           Eigen::Index n)
    {
        s.validate();
        if (paths_per_user < 1)
            throw DomainError("paths_per_user must be positive");
        std::vector<LocSample> out;
        out.reserve(static_cast<std::size_t>(s.num_samples));
        for (int i = 0; i < s.num_samples; ++i)
        {
            Rng rng = make_rng(substream(trial_seed(seed, static_cast<std::uint64_t>(i)), stream::paths));
            std::uniform_real_distribution<double> u(0.0, 1.0);
            std::normal_distribution<double> g(0.0, 1.0);
            const double r = s.region_radius * std::sqrt(u(rng));
            const double phi = 2.0 * std::numbers::pi * u(rng);
            const std::array<double, 3> user{s.region_center[0] + r * std::cos(phi), s.region_center[1] + r * std::sin(phi),
                                             s.region_center[2]};
            std::vector<PathTriplet> paths{los_path(s, user)};
            const double scatter_std = std::abs(paths[0].gain) * std::sqrt(0.1 / 2.0);
            for (int l = 1; l < paths_per_user; ++l)
            {
                const double re = g(rng);
                const double im = g(rng);
                const double angle = u(rng);
                const double delay = u(rng);
                paths.push_back({cdouble(re, im) * scatter_std, angle, delay});
            }
            auto h = synth_channel(paths, m, n);
            const double power = h.entries().squaredNorm() / static_cast<double>(m * n);
            out.push_back({std::move(h), {user[0], user[1]}, power});
        }
        return out;
    }

    PositionScaler PositionScaler::for_scenario(const LocScenario &s)
    {
        return {s.region_center[0] - s.region_radius, s.region_center[1] - s.region_radius, 2.0 * s.region_radius};
    }

    std::array<double, 2> PositionScaler::normalize(const std::array<double, 2> &p) const
    {
        return {(p[0] - x0) / side, (p[1] - y0) / side};
    }

    std::array<double, 2> PositionScaler::denormalize(const std::array<double, 2> &u) const
    {
        return {x0 + u[0] * side, y0 + u[1] * side};
    }

    HarCsvError::HarCsvError(std::size_t line, std::size_t column, const std::string &what)
        : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line), column_(column)
    {
    }

    namespace
    {
        std::vector<std::string> split_cells(const std::string &line)
        {
            std::vector<std::string> cells;
            std::string cell;
            std::istringstream in(line);
            while (std::getline(in, cell, ','))
                cells.push_back(cell);
            if (!line.empty() && line.back() == ',')
                cells.emplace_back();
            return cells;
        }

        std::string trim(const std::string &s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        }

        double parse_number(const std::string &raw, std::size_t line, std::size_t col)
        {
            const auto cell = trim(raw);
            double v = 0.0;
            const auto *end = cell.data() + cell.size();
            const auto res = std::from_chars(cell.data(), end, v);
            if (cell.empty() || res.ec != std::errc() || res.ptr != end || !std::isfinite(v))
                throw HarCsvError(line, col, "not a finite number: '" + cell + "'");
            return v;
        }
    }

    std::vector<HarGroup> parse_har_csv(const std::string &text, int t, int m, int n)
    {
        if (t < 1 || m < 1 || n < 1)
            throw DomainError("HAR dimensions must be positive");
        const auto width = static_cast<std::size_t>(m) * static_cast<std::size_t>(n);
        std::vector<HarGroup> groups;
        std::istringstream in(text);
        std::string line;
        std::size_t line_no = 0;
        HarGroup *current = nullptr;
        int rows_in_group = 0;
        while (std::getline(in, line))
        {
            ++line_no;
            if (trim(line).empty())
                continue;
            const auto cells = split_cells(line);
            if (current == nullptr)
            {
                if (cells.size() != 2 || trim(cells[0]) != "label")
                    throw HarCsvError(line_no, 1, "expected a group header 'label,<class>'");
                const double c = parse_number(cells[1], line_no, 2);
                if (c != std::floor(c) || c < 0 || c >= har_num_classes)
                    throw HarCsvError(line_no, 2, "label must be an integer in [0, 7)");
                groups.push_back({ModulusStack{t, m, n, std::vector<double>(static_cast<std::size_t>(t) * width)}, static_cast<int>(c)});
                current = &groups.back();
                rows_in_group = 0;
                continue;
            }
            if (cells.size() != width)
                throw HarCsvError(line_no, std::min(cells.size(), width) + 1,
                                  "ragged row: " + std::to_string(cells.size()) + " values, expected " + std::to_string(width));
            for (std::size_t j = 0; j < width; ++j)
            {
                const double v = parse_number(cells[j], line_no, j + 1);
                if (v < 0.0)
                    throw HarCsvError(line_no, j + 1, "modulus must be nonnegative");
                current->modulus.values[static_cast<std::size_t>(rows_in_group) * width + j] = v;
            }
            if (++rows_in_group == t)
                current = nullptr;
        }
        if (current != nullptr)
            throw HarCsvError(line_no + 1, 1, "group truncated: " + std::to_string(rows_in_group) + " of " + std::to_string(t) + " rows");
        return groups;
    }

    std::vector<HarGroup> ingest_har_csv(const std::filesystem::path &path, int t, int m, int n)
    {
        const auto bytes = detail::read_file(path);
        return parse_har_csv(std::string(bytes.begin(), bytes.end()), t, m, n);
    }

    std::string format_har_csv(const std::vector<HarGroup> &groups)
    {
        std::ostringstream out;
        out.precision(17);
        for (const auto &g : groups)
        {
            out << "label," << g.label << '\n';
            const auto width = static_cast<std::size_t>(g.modulus.m) * static_cast<std::size_t>(g.modulus.n);
            for (int ti = 0; ti < g.modulus.t; ++ti)
            {
                for (std::size_t j = 0; j < width; ++j)
                    out << (j ? "," : "") << g.modulus.values[static_cast<std::size_t>(ti) * width + j];
                out << '\n';
            }
        }
        return out.str();
    }

    std::vector<HarGroup> gen_har_synthetic(int groups_per_class, int t, int m, int n, std::uint64_t seed)
    {
        if (groups_per_class < 1 || t < 1 || m < 1 || n < 1)
            throw DomainError("synthetic HAR sizes must be positive");
        std::vector<HarGroup> out;
        const auto width = static_cast<std::size_t>(m) * static_cast<std::size_t>(n);
        for (int g = 0; g < groups_per_class; ++g)
            for (int c = 0; c < har_num_classes; ++c)
            {
                Rng rng = make_rng(substream(trial_seed(seed, static_cast<std::uint64_t>(g * har_num_classes + c)), stream::paths));
                std::normal_distribution<double> jitter(0.0, 0.05);
                const double amp = 1.0 + jitter(rng);
                HarGroup grp{ModulusStack{t, m, n, std::vector<double>(static_cast<std::size_t>(t) * width)}, c};
                // Class c: temporal frequency (c + 1), subcarrier tilt alternating with parity.
                for (int ti = 0; ti < t; ++ti)
                    for (std::size_t j = 0; j < width; ++j)
                    {
                        const double tt = static_cast<double>(ti) / t;
                        const double ss = static_cast<double>(j) / static_cast<double>(width);
                        const double pattern = std::sin(2.0 * std::numbers::pi * ((c + 1) * tt + (c % 2 ? 1.0 : -1.0) * (c / 2 + 1) * ss));
                        grp.modulus.values[static_cast<std::size_t>(ti) * width + j] = std::max(0.0, 2.0 + amp * pattern + jitter(rng));
                    }
                out.push_back(std::move(grp));
            }
        return out;
    }
}
