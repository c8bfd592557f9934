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

#include "csivis/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

namespace csivis
{
    namespace
    {
        std::vector<std::string> split_csv(const std::string &line)
        {
            std::vector<std::string> out;
            std::string cell;
            std::istringstream in(line);
            while (std::getline(in, cell, ','))
                out.push_back(cell);
            if (!line.empty() && line.back() == ',')
                out.emplace_back();
            return out;
        }

        std::string fmt(double v, int digits = 2)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.*f", digits, v);
            return buf;
        }

        const char *const palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                       "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

        struct Layout
        {
            std::string x, y, label;
            std::vector<std::string> series;
        };

        Layout layout_for(PlotKind kind)
        {
            switch (kind)
            {
            case PlotKind::ce:
                return {"snr_db", "mean_nmse_db", "NMSE (dB)", {"method", "path_count"}};
            case PlotKind::har:
                return {"epoch", "test_accuracy", "test accuracy", {}};
            case PlotKind::loc:
                return {"epoch", "mean_error_m", "mean error (m)", {"method", "snr_db"}};
            case PlotKind::automatic:
                break;
            }
            throw PlotError("plot kind must be resolved");
        }
    }

    PlotKind parse_plot_kind(const std::string &name)
    {
        if (name == "auto")
            return PlotKind::automatic;
        if (name == "ce")
            return PlotKind::ce;
        if (name == "har")
            return PlotKind::har;
        if (name == "loc")
            return PlotKind::loc;
        throw PlotError("unknown plot kind '" + name + "' (expected auto, ce, har or loc)");
    }

    std::string emit_plot(const std::string &csv, PlotKind kind)
    {
        std::istringstream in(csv);
        std::string line;
        int line_no = 0;
        std::vector<std::string> header;
        std::vector<std::pair<int, std::vector<std::string>>> records;
        while (std::getline(in, line))
        {
            ++line_no;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.empty() || line[0] == '#')
                continue;
            auto cells = split_csv(line);
            if (header.empty())
                header = std::move(cells);
            else
                records.emplace_back(line_no, std::move(cells));
        }
        if (header.empty())
            throw PlotError("empty results file");

        const auto column = [&](const std::string &name) -> std::size_t
        {
            const auto it = std::find(header.begin(), header.end(), name);
            if (it == header.end())
                throw PlotError("missing column '" + name + "'");
            return static_cast<std::size_t>(it - header.begin());
        };
        const auto has = [&](const std::string &name) { return std::find(header.begin(), header.end(), name) != header.end(); };

        if (kind == PlotKind::automatic)
        {
            if (has("mean_nmse_db"))
                kind = PlotKind::ce;
            else if (has("test_accuracy"))
                kind = PlotKind::har;
            else if (has("mean_error_m"))
                kind = PlotKind::loc;
            else
                throw PlotError("cannot infer the plot kind from the header");
        }
        const Layout layout = layout_for(kind);
        const auto xi = column(layout.x), yi = column(layout.y);
        std::vector<std::size_t> si;
        for (const auto &s : layout.series)
            si.push_back(column(s));

        std::map<std::string, std::vector<std::pair<double, double>>> series;
        std::vector<std::string> order;
        for (const auto &[no, cells] : records)
        {
            if (cells.size() != header.size())
                throw PlotError("line " + std::to_string(no) + ": expected " + std::to_string(header.size()) + " fields, found " +
                                std::to_string(cells.size()));
            double x = 0.0, y = 0.0;
            try
            {
                std::size_t px = 0, py = 0;
                x = std::stod(cells[xi], &px);
                y = std::stod(cells[yi], &py);
                if (px != cells[xi].size() || py != cells[yi].size())
                    throw std::invalid_argument("trailing characters");
            }
            catch (const std::exception &)
            {
                throw PlotError("line " + std::to_string(no) + ": non-numeric value");
            }
            if (!std::isfinite(x) || !std::isfinite(y))
                throw PlotError("line " + std::to_string(no) + ": non-finite value");
            std::string name;
            for (std::size_t k = 0; k < si.size(); ++k)
                name += (k ? " " : "") + layout.series[k] + "=" + cells[si[k]];
            if (name.empty())
                name = layout.y;
            if (!series.count(name))
                order.push_back(name);
            series[name].emplace_back(x, y);
        }
        if (order.empty())
            throw PlotError("results file has a header but no data rows");

        double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
        for (const auto &[name, pts] : series)
            for (const auto &[x, y] : pts)
            {
                x0 = std::min(x0, x);
                x1 = std::max(x1, x);
                y0 = std::min(y0, y);
                y1 = std::max(y1, y);
            }
        if (x1 - x0 < 1e-12)
        {
            x0 -= 1.0;
            x1 += 1.0;
        }
        if (y1 - y0 < 1e-12)
        {
            y0 -= 1.0;
            y1 += 1.0;
        }

        const double width = 640, height = 420, left = 70, right = 200, top = 20, bottom = 50;
        const double pw = width - left - right, ph = height - top - bottom;
        const auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
        const auto sy = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

        std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width, 0) + "\" height=\"" + fmt(height, 0) +
                          "\" font-family=\"sans-serif\" font-size=\"11\">\n";
        svg += "<rect x=\"0\" y=\"0\" width=\"" + fmt(width, 0) + "\" height=\"" + fmt(height, 0) + "\" fill=\"white\"/>\n";
        svg += "<rect x=\"" + fmt(left) + "\" y=\"" + fmt(top) + "\" width=\"" + fmt(pw) + "\" height=\"" + fmt(ph) +
               "\" fill=\"none\" stroke=\"black\"/>\n";
        for (int t = 0; t <= 4; ++t)
        {
            const double xv = x0 + (x1 - x0) * t / 4.0, yv = y0 + (y1 - y0) * t / 4.0;
            svg += "<text x=\"" + fmt(sx(xv)) + "\" y=\"" + fmt(top + ph + 15) + "\" text-anchor=\"middle\">" + fmt(xv, 3) + "</text>\n";
            svg += "<text x=\"" + fmt(left - 5) + "\" y=\"" + fmt(sy(yv) + 4) + "\" text-anchor=\"end\">" + fmt(yv, 3) + "</text>\n";
        }
        svg += "<text x=\"" + fmt(left + pw / 2) + "\" y=\"" + fmt(height - 10) + "\" text-anchor=\"middle\">" + layout.x + "</text>\n";
        svg += "<text x=\"15\" y=\"" + fmt(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 15 " + fmt(top + ph / 2) +
               ")\">" + layout.label + "</text>\n";
        for (std::size_t k = 0; k < order.size(); ++k)
        {
            const char *colour = palette[k % (sizeof palette / sizeof *palette)];
            std::string points;
            for (const auto &[x, y] : series[order[k]])
                points += (points.empty() ? "" : " ") + fmt(sx(x)) + "," + fmt(sy(y));
            svg += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
            const double ly = top + 12 + 14 * static_cast<double>(k);
            svg += "<line x1=\"" + fmt(left + pw + 10) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" + fmt(left + pw + 30) + "\" y2=\"" +
                   fmt(ly - 4) + "\" stroke=\"" + colour + "\"/>\n";
            svg += "<text x=\"" + fmt(left + pw + 35) + "\" y=\"" + fmt(ly) + "\">" + order[k] + "</text>\n";
        }
        svg += "</svg>\n";
        return svg;
    }
}
