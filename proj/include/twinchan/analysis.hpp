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

#ifndef TWINCHAN_ANALYSIS_HPP
#define TWINCHAN_ANALYSIS_HPP

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace twinchan
{
    // Gap marker inside a MetricSeries; excluded from every statistic.
    inline constexpr double kGap = std::numeric_limits<double>::quiet_NaN();

    struct MetricSeries
    {
        std::vector<double> values;
        double period = 1.0; // s between samples
        std::string label;

        void validate() const;
        double mean() const; // over non-gap values
        std::size_t size() const { return values.size(); }

        // Samples with t = i * period in [t_begin, t_end).
        MetricSeries slice(double t_begin, double t_end) const;
    };

    // CSV with header `t_s,value`; empty or "nan" values become gaps. The
    // period is taken from the timestamps, which must be evenly spaced.
    MetricSeries read_metric_csv(std::istream &in, std::string label = {});
    void write_metric_csv(std::ostream &out, const MetricSeries &s);

    struct SimilarityReport
    {
        int max_lag = 0;
        std::vector<double> rho_by_lag; // index k + max_lag
        int best_lag = 0;
        double score = 0.0;

        double rho(int k) const { return rho_by_lag.at(static_cast<std::size_t>(k + max_lag)); }
    };

    // rho(k) = sum_n (x(n) - mx)(y(n+k) - my) / sqrt(sum (x - mx)^2 * sum (y - my)^2)
    // over k in [-max_lag, max_lag]. The shorter series is zero-padded at the end
    // and the means include the padding. Terms with y(n+k) outside the series or
    // touching a gap are left out. score = max rho; ties go to the smaller |k|.
    SimilarityReport normalized_xcorr(const MetricSeries &x, const MetricSeries &y, int max_lag);

    // normalized_xcorr(real, twin) with matching periods required.
    SimilarityReport compare_runs(const MetricSeries &real, const MetricSeries &twin, int max_lag = 10);

    // Row means (e.g. per metric), column means (e.g. per UE or experiment) and
    // the overall mean of a score table. NaN cells are skipped.
    struct ScoreAverages
    {
        std::vector<double> row_means;
        std::vector<double> column_means;
        double overall = 0.0;
    };

    ScoreAverages average_scores(const std::vector<std::vector<double>> &table);

    struct JammingReport
    {
        double pre_mean = 0.0;
        double during_mean = 0.0;
        double drop_fraction = 0.0; // 1 - during/pre, for linear-valued series
        double drop_db = 0.0;       // pre - during, for dB-valued series
    };

    JammingReport jamming_report(const MetricSeries &pre_jam, const MetricSeries &during_jam);

} // namespace twinchan

#endif
