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

#ifndef csivis_plot_H
#define csivis_plot_H

#include <stdexcept>
#include <string>

namespace csivis
{
    class PlotError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    enum class PlotKind
    {
        automatic,
        ce,  // mean_nmse_db against snr_db, one series per method and path count
        har, // test_accuracy against epoch
        loc  // mean_error_m against epoch, one series per method and SNR
    };

    PlotKind parse_plot_kind(const std::string &name);

    // Renders a results CSV as a standalone SVG line chart. Output is a pure function of the input.
    std::string emit_plot(const std::string &csv, PlotKind kind = PlotKind::automatic);
}

#endif
