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

#include "twinchan/dsp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace twinchan::dsp
{
    namespace
    {
        // fftw_malloc'd buffer so every execution matches the plan's alignment.
        class FftBuffer
        {
        public:
            explicit FftBuffer(std::size_t n)
                : n_(n), data_(static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * n)))
            {
                if (data_ == nullptr)
                    throw std::bad_alloc();
            }
            ~FftBuffer() { fftw_free(data_); }
            FftBuffer(const FftBuffer &) = delete;
            FftBuffer &operator=(const FftBuffer &) = delete;

            fftw_complex *get() { return data_; }
            cplx *as_complex() { return reinterpret_cast<cplx *>(data_); }
            std::size_t size() const { return n_; }

        private:
            std::size_t n_;
            fftw_complex *data_;
        };

        // Planning is not thread-safe in FFTW; execution on fresh arrays is.
        // FFTW_ESTIMATE keeps the chosen algorithm (and hence the bits) fixed run to run.
        fftw_plan get_plan(std::size_t n, int sign)
        {
            static std::mutex mutex;
            static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
            std::lock_guard lock(mutex);
            auto key = std::make_pair(n, sign);
            if (auto it = cache.find(key); it != cache.end())
                return it->second;
            FftBuffer in(n), out(n);
            fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), in.get(), out.get(), sign, FFTW_ESTIMATE);
            if (p == nullptr)
                throw std::runtime_error("FFTW planning failed.");
            cache.emplace(key, p);
            return p;
        }

        void execute(std::size_t n, int sign, FftBuffer &in, FftBuffer &out)
        {
            fftw_execute_dft(get_plan(n, sign), in.get(), out.get());
        }

        std::vector<cplx> transform(std::span<const cplx> x, int sign)
        {
            if (x.empty())
                return {};
            FftBuffer in(x.size()), out(x.size());
            std::copy(x.begin(), x.end(), in.as_complex());
            execute(x.size(), sign, in, out);
            return std::vector<cplx>(out.as_complex(), out.as_complex() + x.size());
        }

        // Folds x modulo m so a cyclic correlation against a shorter y stays exact.
        std::vector<double> fold(std::span<const double> x, std::size_t m)
        {
            std::vector<double> out(m, 0.0);
            for (std::size_t i = 0; i < x.size(); ++i)
                out[i % m] += x[i];
            return out;
        }
    } // namespace

    std::vector<cplx> fft(std::span<const cplx> x) { return transform(x, FFTW_FORWARD); }
    std::vector<cplx> ifft(std::span<const cplx> x) { return transform(x, FFTW_BACKWARD); }

    std::vector<cplx> cross_correlate_direct(std::span<const double> x, std::span<const cplx> y, Boundary boundary)
    {
        const std::size_t n = x.size(), m = y.size();
        std::vector<cplx> out(m);
        if (n == 0 || m == 0)
            return out;
        for (std::size_t k = 0; k < m; ++k)
        {
            cplx acc{};
            if (boundary == Boundary::ZeroPad)
            {
                const std::size_t last = std::min(n, m - k);
                for (std::size_t i = 0; i < last; ++i)
                    acc += x[i] * y[i + k];
            }
            else
            {
                for (std::size_t i = 0; i < n; ++i)
                    acc += x[i] * y[(i + k) % m];
            }
            out[k] = acc;
        }
        return out;
    }

    std::vector<cplx> cross_correlate_fft(std::span<const double> x, std::span<const cplx> y, Boundary boundary)
    {
        const std::size_t n = x.size(), m = y.size();
        std::vector<cplx> out(m);
        if (n == 0 || m == 0)
            return out;

        if (boundary == Boundary::Cyclic)
        {
            const auto folded = fold(x, m);
            FftBuffer xb(m), yb(m), xf(m), yf(m);
            std::transform(folded.begin(), folded.end(), xb.as_complex(), [](double v) { return cplx{v, 0.0}; });
            std::copy(y.begin(), y.end(), yb.as_complex());
            execute(m, FFTW_FORWARD, xb, xf);
            execute(m, FFTW_FORWARD, yb, yf);
            for (std::size_t i = 0; i < m; ++i)
                yf.as_complex()[i] *= std::conj(xf.as_complex()[i]);
            execute(m, FFTW_BACKWARD, yf, yb);
            const double scale = 1.0 / static_cast<double>(m);
            for (std::size_t i = 0; i < m; ++i)
                out[i] = yb.as_complex()[i] * scale;
            return out;
        }

        // Overlap-save: each block of size F yields F - n + 1 valid lags.
        const std::size_t fft_size = std::max<std::size_t>(4096, std::bit_ceil(4 * n));
        const std::size_t step = fft_size - n + 1;
        FftBuffer xb(fft_size), xf(fft_size), yb(fft_size), yf(fft_size);
        std::fill(xb.as_complex(), xb.as_complex() + fft_size, cplx{});
        std::transform(x.begin(), x.end(), xb.as_complex(), [](double v) { return cplx{v, 0.0}; });
        execute(fft_size, FFTW_FORWARD, xb, xf);
        const double scale = 1.0 / static_cast<double>(fft_size);

        for (std::size_t k0 = 0; k0 < m; k0 += step)
        {
            cplx *seg = yb.as_complex();
            const std::size_t avail = std::min(fft_size, m - k0);
            std::copy(y.begin() + static_cast<std::ptrdiff_t>(k0), y.begin() + static_cast<std::ptrdiff_t>(k0 + avail), seg);
            std::fill(seg + avail, seg + fft_size, cplx{});
            execute(fft_size, FFTW_FORWARD, yb, yf);
            for (std::size_t i = 0; i < fft_size; ++i)
                yf.as_complex()[i] *= std::conj(xf.as_complex()[i]);
            execute(fft_size, FFTW_BACKWARD, yf, yb);
            const std::size_t count = std::min(step, m - k0);
            for (std::size_t i = 0; i < count; ++i)
                out[k0 + i] = yb.as_complex()[i] * scale;
        }
        return out;
    }

    std::vector<cplx> cross_correlate(std::span<const double> x, std::span<const cplx> y, Boundary boundary)
    {
        // The direct sum wins for short references; FFT beyond roughly 64 taps.
        if (x.size() <= 64 || y.size() <= 256)
            return cross_correlate_direct(x, y, boundary);
        return cross_correlate_fft(x, y, boundary);
    }

    std::vector<double> cross_correlate(std::span<const double> x, std::span<const double> y, Boundary boundary)
    {
        std::vector<cplx> yc(y.begin(), y.end());
        const auto c = cross_correlate(x, std::span<const cplx>(yc), boundary);
        std::vector<double> out(c.size());
        std::transform(c.begin(), c.end(), out.begin(), [](const cplx &v) { return v.real(); });
        return out;
    }

    std::vector<cplx> convolve(std::span<const cplx> x, std::span<const double> h)
    {
        if (x.empty() || h.empty())
            return {};
        const std::size_t out_len = x.size() + h.size() - 1;
        if (h.size() <= 32)
        {
            std::vector<cplx> out(out_len);
            for (std::size_t j = 0; j < h.size(); ++j)
                for (std::size_t i = 0; i < x.size(); ++i)
                    out[i + j] += h[j] * x[i];
            return out;
        }

        // Overlap-add.
        const std::size_t fft_size = std::max<std::size_t>(4096, std::bit_ceil(4 * h.size()));
        const std::size_t step = fft_size - h.size() + 1;
        FftBuffer hb(fft_size), hf(fft_size), xb(fft_size), xf(fft_size);
        std::fill(hb.as_complex(), hb.as_complex() + fft_size, cplx{});
        std::transform(h.begin(), h.end(), hb.as_complex(), [](double v) { return cplx{v, 0.0}; });
        execute(fft_size, FFTW_FORWARD, hb, hf);
        const double scale = 1.0 / static_cast<double>(fft_size);

        std::vector<cplx> out(out_len);
        for (std::size_t i0 = 0; i0 < x.size(); i0 += step)
        {
            const std::size_t count = std::min(step, x.size() - i0);
            cplx *seg = xb.as_complex();
            std::copy(x.begin() + static_cast<std::ptrdiff_t>(i0), x.begin() + static_cast<std::ptrdiff_t>(i0 + count), seg);
            std::fill(seg + count, seg + fft_size, cplx{});
            execute(fft_size, FFTW_FORWARD, xb, xf);
            for (std::size_t i = 0; i < fft_size; ++i)
                xf.as_complex()[i] *= hf.as_complex()[i];
            execute(fft_size, FFTW_BACKWARD, xf, xb);
            const std::size_t valid = std::min(fft_size, out_len - i0);
            for (std::size_t i = 0; i < valid; ++i)
                out[i0 + i] += xb.as_complex()[i] * scale;
        }
        return out;
    }

    std::vector<double> design_lowpass(double cutoff, std::size_t taps)
    {
        if (!(cutoff > 0.0) || cutoff > 0.5)
            throw std::invalid_argument("design_lowpass: cutoff must be in (0, 0.5].");
        if (taps == 0 || taps % 2 == 0)
            throw std::invalid_argument("design_lowpass: tap count must be odd.");
        std::vector<double> h(taps);
        const double mid = static_cast<double>(taps - 1) / 2.0;
        const double pi = std::numbers::pi;
        double sum = 0.0;
        for (std::size_t i = 0; i < taps; ++i)
        {
            const double t = static_cast<double>(i) - mid;
            const double sinc = t == 0.0 ? 2.0 * cutoff : std::sin(2.0 * pi * cutoff * t) / (pi * t);
            const double w = taps == 1 ? 1.0
                                       : 0.42 - 0.5 * std::cos(2.0 * pi * static_cast<double>(i) / static_cast<double>(taps - 1)) +
                                             0.08 * std::cos(4.0 * pi * static_cast<double>(i) / static_cast<double>(taps - 1));
            h[i] = sinc * w;
            sum += h[i];
        }
        for (auto &v : h)
            v /= sum;
        return h;
    }

} // namespace twinchan::dsp
