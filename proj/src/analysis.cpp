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

#include "twinchan/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace twinchan
{
    void MetricSeries::validate() const
    {
        if (!(period > 0.0) || !std::isfinite(period))
            throw std::invalid_argument("MetricSeries '" + label + "': period must be positive.");
        for (double v : values)
            if (std::isinf(v))
                throw std::invalid_argument("MetricSeries '" + label + "': values must be finite or gaps.");
    }

    double MetricSeries::mean() const
    {
        double s = 0.0;
        std::size_t n = 0;
        for (double v : values)
            if (!std::isnan(v))
            {
                s += v;
                ++n;
            }
        return n ? s / static_cast<double>(n) : kGap;
    }

    MetricSeries MetricSeries::slice(double t_begin, double t_end) const
    {
        MetricSeries out{{}, period, label};
        for (std::size_t i = 0; i < values.size(); ++i)
        {
            const double t = static_cast<double>(i) * period;
            if (t >= t_begin - 1e-9 * period && t < t_end - 1e-9 * period)
                out.values.push_back(values[i]);
        }
        return out;
    }

    MetricSeries read_metric_csv(std::istream &in, std::string label)
    {
        MetricSeries s;
        s.label = std::move(label);
        std::vector<double> times;
        std::string line;
        std::size_t line_no = 0;
        bool header = false;
        while (std::getline(in, line))
        {
            ++line_no;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.empty())
                continue;
            if (!header)
            {
                if (line != "t_s,value")
                    throw std::invalid_argument("Metric CSV line " + std::to_string(line_no) +
                                                ": expected header t_s,value.");
                header = true;
                continue;
            }
            const auto comma = line.find(',');
            if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
                throw std::invalid_argument("Metric CSV line " + std::to_string(line_no) + ": expected two columns.");
            const std::string ts = line.substr(0, comma), vs = line.substr(comma + 1);
            double t = 0.0, v = kGap;
            try
            {
                std::size_t pos = 0;
                t = std::stod(ts, &pos);
                if (pos != ts.size())
                    throw std::invalid_argument("");
                if (!vs.empty() && vs != "nan" && vs != "NaN")
                {
                    v = std::stod(vs, &pos);
                    if (pos != vs.size() || !std::isfinite(v))
                        throw std::invalid_argument("");
                }
            }
            catch (const std::exception &)
            {
                throw std::invalid_argument("Metric CSV line " + std::to_string(line_no) + ": unparsable number.");
            }
            times.push_back(t);
            s.values.push_back(v);
        }
        if (s.values.empty())
            throw std::invalid_argument("Metric CSV has no samples.");
        if (times.size() >= 2)
        {
            s.period = times[1] - times[0];
            if (!(s.period > 0.0))
                throw std::invalid_argument("Metric CSV timestamps must increase.");
            for (std::size_t i = 1; i < times.size(); ++i)
                if (std::abs(times[i] - times[0] - static_cast<double>(i) * s.period) > 1e-6 * s.period * static_cast<double>(i))
                    throw std::invalid_argument("Metric CSV line " + std::to_string(i + 2) +
                                                ": timestamps are not evenly spaced.");
        }
        return s;
    }

    void write_metric_csv(std::ostream &out, const MetricSeries &s)
    {
        out << "t_s,value\n" << std::setprecision(12);
        for (std::size_t i = 0; i < s.values.size(); ++i)
        {
            out << static_cast<double>(i) * s.period << ',';
            if (!std::isnan(s.values[i]))
                out << s.values[i];
            out << '\n';
        }
    }

    SimilarityReport normalized_xcorr(const MetricSeries &x, const MetricSeries &y, int max_lag)
    {
        if (x.values.empty() || y.values.empty())
            throw std::invalid_argument("normalized_xcorr: both series must be non-empty.");
        if (max_lag < 0)
            throw std::invalid_argument("normalized_xcorr: max_lag must be non-negative.");
        const std::size_t n = std::max(x.size(), y.size());
        std::vector<double> a(x.values), b(y.values);
        a.resize(n, 0.0);
        b.resize(n, 0.0);

        auto centered = [](std::vector<double> &v, const std::string &label)
        {
            double s = 0.0;
            std::size_t c = 0;
            for (double e : v)
                if (!std::isnan(e))
                {
                    s += e;
                    ++c;
                }
            const double m = c ? s / static_cast<double>(c) : 0.0;
            double ss = 0.0;
            for (double &e : v)
                if (!std::isnan(e))
                {
                    e -= m;
                    ss += e * e;
                }
            if (!(ss > 0.0))
                throw std::invalid_argument("normalized_xcorr: series '" + label + "' has zero variance.");
            return ss;
        };
        const double denom = std::sqrt(centered(a, x.label) * centered(b, y.label));

        SimilarityReport r;
        r.max_lag = max_lag;
        r.rho_by_lag.resize(2 * static_cast<std::size_t>(max_lag) + 1);
        const auto ni = static_cast<long long>(n);
        for (int k = -max_lag; k <= max_lag; ++k)
        {
            double s = 0.0;
            for (long long i = std::max(0LL, -static_cast<long long>(k)); i < ni && i + k < ni; ++i)
            {
                const double u = a[static_cast<std::size_t>(i)], v = b[static_cast<std::size_t>(i + k)];
                if (!std::isnan(u) && !std::isnan(v))
                    s += u * v;
            }
            r.rho_by_lag[static_cast<std::size_t>(k + max_lag)] = s / denom;
        }
        r.best_lag = 0;
        r.score = r.rho(0);
        for (int d = 1; d <= max_lag; ++d)
            for (int k : {-d, d})
                if (r.rho(k) > r.score)
                {
                    r.score = r.rho(k);
                    r.best_lag = k;
                }
        return r;
    }

    SimilarityReport compare_runs(const MetricSeries &real, const MetricSeries &twin, int max_lag)
    {
        real.validate();
        twin.validate();
        if (std::abs(real.period - twin.period) > 1e-9 * std::max(real.period, twin.period))
            throw std::invalid_argument("compare_runs: series have different sampling periods.");
        return normalized_xcorr(real, twin, max_lag);
    }

    ScoreAverages average_scores(const std::vector<std::vector<double>> &table)
    {
        ScoreAverages a;
        std::size_t cols = 0;
        for (const auto &row : table)
            cols = std::max(cols, row.size());
        std::vector<double> col_sum(cols, 0.0);
        std::vector<std::size_t> col_n(cols, 0);
        double total = 0.0;
        std::size_t total_n = 0;
        for (const auto &row : table)
        {
            double s = 0.0;
            std::size_t c = 0;
            for (std::size_t j = 0; j < row.size(); ++j)
                if (!std::isnan(row[j]))
                {
                    s += row[j];
                    ++c;
                    col_sum[j] += row[j];
                    ++col_n[j];
                }
            a.row_means.push_back(c ? s / static_cast<double>(c) : kGap);
            total += s;
            total_n += c;
        }
        for (std::size_t j = 0; j < cols; ++j)
            a.column_means.push_back(col_n[j] ? col_sum[j] / static_cast<double>(col_n[j]) : kGap);
        a.overall = total_n ? total / static_cast<double>(total_n) : kGap;
        return a;
    }

    JammingReport jamming_report(const MetricSeries &pre_jam, const MetricSeries &during_jam)
    {
        JammingReport r;
        r.pre_mean = pre_jam.mean();
        r.during_mean = during_jam.mean();
        if (std::isnan(r.pre_mean) || std::isnan(r.during_mean))
            throw std::invalid_argument("jamming_report: both segments need at least one sample.");
        if (r.pre_mean == 0.0)
            throw std::invalid_argument("jamming_report: pre-jam mean is zero.");
        r.drop_fraction = 1.0 - r.during_mean / r.pre_mean;
        r.drop_db = r.pre_mean - r.during_mean;
        return r;
    }

} // namespace twinchan
