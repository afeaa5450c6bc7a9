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

#include "twinchan/plot.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace twinchan
{
    namespace
    {
        std::string escape(const std::string &s)
        {
            std::string out;
            for (char c : s)
            {
                switch (c)
                {
                case '<': out += "&lt;"; break;
                case '>': out += "&gt;"; break;
                case '&': out += "&amp;"; break;
                case '"': out += "&quot;"; break;
                default: out += c;
                }
            }
            return out;
        }

        std::string num(double v)
        {
            std::ostringstream os;
            os << std::setprecision(6) << v;
            return os.str();
        }

        const char *kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    } // namespace

    void write_svg_line_plot(std::ostream &out, const std::vector<PlotSeries> &series, const PlotOptions &opts)
    {
        double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
        for (const auto &s : series)
        {
            if (s.x.size() != s.y.size())
                throw std::invalid_argument("Plot series '" + s.label + "': x and y lengths differ.");
            for (std::size_t i = 0; i < s.x.size(); ++i)
                if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
                {
                    x0 = std::min(x0, s.x[i]);
                    x1 = std::max(x1, s.x[i]);
                    y0 = std::min(y0, s.y[i]);
                    y1 = std::max(y1, s.y[i]);
                }
        }
        if (!std::isfinite(x0))
            x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
        if (x1 == x0)
            x1 = x0 + 1.0;
        if (y1 == y0)
            y0 -= 0.5, y1 += 0.5;
        const double pad = 0.05 * (y1 - y0);
        y0 -= pad;
        y1 += pad;

        const double left = 64, right = 16, top = 32, bottom = 48;
        const double w = opts.width - left - right, h = opts.height - top - bottom;
        auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * w; };
        auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * h; };

        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\"" << opts.height
            << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
        out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w << "\" height=\"" << h
            << "\" fill=\"none\" stroke=\"#444\"/>\n";
        for (int i = 0; i <= 4; ++i)
        {
            const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
            out << "<text x=\"" << px(xv) << "\" y=\"" << top + h + 16 << "\" text-anchor=\"middle\">" << num(xv)
                << "</text>\n";
            out << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << num(yv)
                << "</text>\n";
        }
        if (!opts.title.empty())
            out << "<text x=\"" << opts.width / 2 << "\" y=\"20\" text-anchor=\"middle\">" << escape(opts.title)
                << "</text>\n";
        if (!opts.x_label.empty())
            out << "<text x=\"" << left + w / 2 << "\" y=\"" << opts.height - 8 << "\" text-anchor=\"middle\">"
                << escape(opts.x_label) << "</text>\n";
        if (!opts.y_label.empty())
            out << "<text x=\"14\" y=\"" << top + h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
                << top + h / 2 << ")\">" << escape(opts.y_label) << "</text>\n";

        for (std::size_t k = 0; k < series.size(); ++k)
        {
            const auto &s = series[k];
            const char *color = kColors[k % std::size(kColors)];
            std::string d;
            bool pen = false;
            for (std::size_t i = 0; i < s.x.size(); ++i)
            {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                {
                    pen = false;
                    continue;
                }
                d += (pen ? " L" : " M") + num(px(s.x[i])) + " " + num(py(s.y[i]));
                pen = true;
            }
            out << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
            if (!s.label.empty())
                out << "<text x=\"" << left + 8 << "\" y=\"" << top + 16 + 14 * static_cast<double>(k)
                    << "\" fill=\"" << color << "\">" << escape(s.label) << "</text>\n";
        }
        out << "</svg>\n";
    }

} // namespace twinchan
