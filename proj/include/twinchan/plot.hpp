// SPDX-License-Identifier: Apache-2.0
//
// twinchan: software twin of an FPGA channel emulator and its sounding toolchain
// Copyright (C) 2026 The twinchan authors
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

#ifndef TWINCHAN_PLOT_HPP
#define TWINCHAN_PLOT_HPP

#include <iosfwd>
#include <string>
#include <vector>

// Minimal static SVG line plots for batch outputs.

namespace twinchan
{
    struct PlotSeries
    {
        std::string label;
        std::vector<double> x;
        std::vector<double> y; // non-finite values break the line
    };

    struct PlotOptions
    {
        std::string title;
        std::string x_label;
        std::string y_label;
        int width = 720;
        int height = 360;
    };

    void write_svg_line_plot(std::ostream &out, const std::vector<PlotSeries> &series, const PlotOptions &opts = {});

} // namespace twinchan

#endif
