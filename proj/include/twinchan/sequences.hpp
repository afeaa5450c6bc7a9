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

#ifndef TWINCHAN_SEQUENCES_HPP
#define TWINCHAN_SEQUENCES_HPP

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

// Sounding code sequences: GLFSR / m-sequences, Gold, Golay (802.11ad Ga128/Gb128)
// and LS codes. Bits map to chips as 0 -> +1, 1 -> -1.

namespace twinchan::seq
{
    enum class Family
    {
        Glfsr,
        Gold,
        GolayA,
        GolayB,
        Ls
    };

    std::string to_string(Family f);

    struct GlfsrParams
    {
        int degree = 8;
        std::uint64_t mask = 0;     // output XOR mask; 0 = plain LFSR output
        std::uint64_t seed = 1;
        std::uint64_t feedback = 0; // Galois feedback mask actually used
    };

    // Polynomials as coefficient bitmasks: bit i holds the coefficient of z^i,
    // e.g. z^6 + z + 1 -> 0x43.
    struct GoldParams
    {
        std::uint64_t poly_a = 0;
        std::uint64_t poly_b = 0;
        int shift = 0;
    };

    struct GolayParams
    {
        int length = 128;
    };

    struct LsParams
    {
        int length = 0;
    };

    using Params = std::variant<GlfsrParams, GoldParams, GolayParams, LsParams>;

    // A +-1 chip sequence with its provenance. Immutable.
    class CodeSequence
    {
    public:
        CodeSequence(std::vector<int> chips, Family family, Params params);

        std::span<const int> chips() const { return chips_; }
        std::size_t size() const { return chips_.size(); }
        int operator[](std::size_t i) const { return chips_[i]; }
        Family family() const { return family_; }
        const Params &params() const { return params_; }
        std::string describe() const; // e.g. "glfsr:8:0:1"

    private:
        std::vector<int> chips_;
        Family family_;
        Params params_;
    };

    inline int bit_to_chip(int bit) { return bit ? -1 : +1; }

    // Primitive Galois feedback mask used by the right-shift LFSR for a degree
    // in [2, 32]. The table ships with the library so sequences are reproducible.
    std::uint64_t glfsr_feedback_mask(int degree);

    // One full period (2^degree - 1 chips). Throws on zero seed, seed wider than
    // the register, or if the period check fails.
    CodeSequence gen_glfsr(int degree, std::uint64_t mask, std::uint64_t seed);

    // Fibonacci LFSR m-sequence bits for a polynomial given as bitmask. The
    // register is loaded with s[0..m-2] = 0, s[m-1] = 1. Throws if the period
    // is not 2^m - 1.
    std::vector<int> m_sequence_bits(std::uint64_t poly);

    int polynomial_degree(std::uint64_t poly);

    // Chip-wise product of m-sequence A and m-sequence B cyclically advanced by
    // `shift`. Verifies the pair is preferred (three-valued cross-correlation).
    CodeSequence gen_gold(std::uint64_t poly_a, std::uint64_t poly_b, int shift);

    // Ga128 / Gb128 from the 802.11ad recursive construction.
    CodeSequence gen_golay_a128();
    CodeSequence gen_golay_b128();

    // Golay pair of length 2^k from the plain recursion a' = [a b], b' = [a -b].
    std::pair<std::vector<int>, std::vector<int>> golay_pair(int length);

    // First LS codeset [a | b] built from a Golay complementary pair of length
    // length/2, without the interference-free window.
    CodeSequence gen_ls(int length);
    std::vector<int> ls_supported_lengths();

    // Same codeset with an interference-free window of `ifw` zeros after each
    // half: [a 0..0 b 0..0]. Chips are in {-1, 0, +1}.
    std::vector<int> ls_padded(int length, int ifw);

    // chi(k) = sum_n c(n) c((n+k) mod N), k in [0, N-1].
    std::vector<std::int64_t> periodic_autocorrelation(std::span<const int> chips);
    inline std::vector<std::int64_t> periodic_autocorrelation(const CodeSequence &s)
    {
        return periodic_autocorrelation(s.chips());
    }

    // sum_n a(n) b((n+k) mod N), equal lengths required.
    std::vector<std::int64_t> periodic_cross_correlation(std::span<const int> a, std::span<const int> b);

    // Aperiodic autocorrelation for lags 0..N-1 (negative lags are symmetric).
    std::vector<std::int64_t> aperiodic_autocorrelation(std::span<const int> chips);

    struct MeritReport
    {
        std::int64_t peak = 0;
        std::int64_t max_off_peak_abs = 0;
        double peak_to_sidelobe_db = 0.0; // +inf for a perfect sequence
    };

    MeritReport merit_report(const CodeSequence &s);

    // Parses "glfsr:<degree>:<mask>:<seed>", "gold:<poly_a>:<poly_b>:<shift>",
    // "golay:a128", "golay:b128" or "ls:<length>". Integers accept 0x prefixes.
    CodeSequence parse_code_spec(const std::string &spec);

} // namespace twinchan::seq

#endif
