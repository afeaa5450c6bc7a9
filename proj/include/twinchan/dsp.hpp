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

#ifndef TWINCHAN_DSP_HPP
#define TWINCHAN_DSP_HPP

#include "twinchan/core.hpp"

#include <span>
#include <vector>

namespace twinchan::dsp
{
    // Forward/inverse DFT (unnormalized). Thread-safe; plans are cached per size.
    std::vector<cplx> fft(std::span<const cplx> x);
    std::vector<cplx> ifft(std::span<const cplx> x);

    enum class Boundary
    {
        ZeroPad, // y(n+k) = 0 past the end of y
        Cyclic   // y indexed modulo len(y)
    };

    // chi(k) = sum_{n<N} x(n) * y(n+k), k in [0, len(y)-1], N = len(x).
    std::vector<cplx> cross_correlate(std::span<const double> x, std::span<const cplx> y,
                                      Boundary boundary = Boundary::ZeroPad);
    std::vector<double> cross_correlate(std::span<const double> x, std::span<const double> y,
                                        Boundary boundary = Boundary::ZeroPad);

    // The two evaluation routes behind cross_correlate, exposed for testing.
    std::vector<cplx> cross_correlate_direct(std::span<const double> x, std::span<const cplx> y, Boundary boundary);
    std::vector<cplx> cross_correlate_fft(std::span<const double> x, std::span<const cplx> y, Boundary boundary);

    // Full linear convolution, length len(x) + len(h) - 1.
    std::vector<cplx> convolve(std::span<const cplx> x, std::span<const double> h);

    // Linear-phase windowed-sinc (Blackman) low-pass, odd length, unit DC gain.
    // cutoff is the one-sided -6 dB frequency normalized to the sample rate.
    std::vector<double> design_lowpass(double cutoff, std::size_t taps);

} // namespace twinchan::dsp

#endif
