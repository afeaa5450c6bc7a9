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

#include "twinchan/sequences.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace twinchan::seq
{
    namespace
    {
        // Galois (right-shift) feedback masks, index = degree. Each entry was
        // checked to generate a maximal-length sequence.
        constexpr std::uint64_t kFeedbackMasks[33] = {
            0x0,        0x0,        0x3,        0x5,        0x9,        0x12,       0x21,
            0x41,       0x8E,       0x108,      0x204,      0x402,      0x829,      0x100D,
            0x2015,     0x4001,     0x8016,     0x10004,    0x20013,    0x40013,    0x80004,
            0x100002,   0x200001,   0x400010,   0x80000D,   0x1000004,  0x2000023,  0x4000013,
            0x8000004,  0x10000002, 0x20000029, 0x40000004, 0x80000057,
        };

        std::uint64_t parse_uint(const std::string &token)
        {
            std::size_t pos = 0;
            unsigned long long v = 0;
            try
            {
                v = std::stoull(token, &pos, 0);
            }
            catch (const std::exception &)
            {
                throw std::invalid_argument("Code spec: '" + token + "' is not an unsigned integer.");
            }
            if (pos != token.size())
                throw std::invalid_argument("Code spec: '" + token + "' is not an unsigned integer.");
            return v;
        }

        std::string hex(std::uint64_t v)
        {
            std::ostringstream os;
            os << "0x" << std::hex << v;
            return os.str();
        }

        std::vector<int> bits_to_chips(const std::vector<int> &bits)
        {
            std::vector<int> chips(bits.size());
            std::transform(bits.begin(), bits.end(), chips.begin(), bit_to_chip);
            return chips;
        }
    } // namespace

    std::string to_string(Family f)
    {
        switch (f)
        {
        case Family::Glfsr:
            return "glfsr";
        case Family::Gold:
            return "gold";
        case Family::GolayA:
            return "golay_a";
        case Family::GolayB:
            return "golay_b";
        case Family::Ls:
            return "ls";
        }
        return "unknown";
    }

    CodeSequence::CodeSequence(std::vector<int> chips, Family family, Params params)
        : chips_(std::move(chips)), family_(family), params_(std::move(params))
    {
        if (chips_.size() < 2)
            throw std::invalid_argument("CodeSequence: at least 2 chips are required.");
        for (int c : chips_)
            if (c != 1 && c != -1)
                throw std::invalid_argument("CodeSequence: chips must be +1 or -1.");
    }

    std::string CodeSequence::describe() const
    {
        std::ostringstream os;
        if (const auto *g = std::get_if<GlfsrParams>(&params_))
            os << "glfsr:" << g->degree << ':' << g->mask << ':' << g->seed;
        else if (const auto *p = std::get_if<GoldParams>(&params_))
            os << "gold:" << hex(p->poly_a) << ':' << hex(p->poly_b) << ':' << p->shift;
        else if (std::holds_alternative<GolayParams>(params_))
            os << "golay:" << (family_ == Family::GolayA ? "a" : "b") << chips_.size();
        else if (const auto *l = std::get_if<LsParams>(&params_))
            os << "ls:" << l->length;
        return os.str();
    }

    std::uint64_t glfsr_feedback_mask(int degree)
    {
        if (degree < 2 || degree > 32)
            throw std::invalid_argument("GLFSR degree must be in [2, 32], got " + std::to_string(degree) + ".");
        return kFeedbackMasks[degree];
    }

    CodeSequence gen_glfsr(int degree, std::uint64_t mask, std::uint64_t seed)
    {
        const std::uint64_t feedback = glfsr_feedback_mask(degree);
        const std::uint64_t width_mask = (std::uint64_t{1} << degree) - 1;
        if (seed == 0)
            throw std::invalid_argument("GLFSR seed must be non-zero (the all-zero state never leaves itself).");
        if ((seed & ~width_mask) != 0)
            throw std::invalid_argument("GLFSR seed " + hex(seed) + " does not fit a degree-" +
                                        std::to_string(degree) + " register.");
        if ((mask & ~width_mask) != 0)
            throw std::invalid_argument("GLFSR output mask " + hex(mask) + " does not fit a degree-" +
                                        std::to_string(degree) + " register.");

        const std::uint64_t period = width_mask;
        std::vector<int> chips;
        chips.reserve(period);
        std::uint64_t state = seed;
        for (std::uint64_t n = 0; n < period; ++n)
        {
            if (n > 0 && state == seed)
                throw std::runtime_error("GLFSR configuration is not maximal length: period " + std::to_string(n) +
                                         " instead of " + std::to_string(period) + ".");
            int bit = static_cast<int>(state & 1u);
            if (mask != 0)
                bit ^= std::popcount(state & mask) & 1;
            chips.push_back(bit_to_chip(bit));
            const bool lsb = (state & 1u) != 0;
            state >>= 1;
            if (lsb)
                state ^= feedback;
        }
        if (state != seed)
            throw std::runtime_error("GLFSR configuration is not maximal length.");

        return CodeSequence(std::move(chips), Family::Glfsr, GlfsrParams{degree, mask, seed, feedback});
    }

    int polynomial_degree(std::uint64_t poly)
    {
        if (poly == 0)
            return -1;
        return 63 - std::countl_zero(poly);
    }

    std::vector<int> m_sequence_bits(std::uint64_t poly)
    {
        const int m = polynomial_degree(poly);
        if (m < 2 || m > 24)
            throw std::invalid_argument("m-sequence polynomial degree must be in [2, 24], got " + std::to_string(m) + ".");
        if ((poly & 1u) == 0)
            throw std::invalid_argument("m-sequence polynomial " + hex(poly) + " lacks a constant term.");

        const std::size_t period = (std::size_t{1} << m) - 1;
        std::vector<int> s(period + static_cast<std::size_t>(m), 0);
        s[static_cast<std::size_t>(m) - 1] = 1;
        // s[n+m] = sum_{i<m} c_i s[n+i]
        for (std::size_t n = 0; n + static_cast<std::size_t>(m) < s.size(); ++n)
        {
            int acc = 0;
            for (int i = 0; i < m; ++i)
                if ((poly >> i) & 1u)
                    acc ^= s[n + static_cast<std::size_t>(i)];
            s[n + static_cast<std::size_t>(m)] = acc;
        }
        // Period check: the register contents must recur after exactly 2^m - 1 steps, not before.
        auto state_at = [&](std::size_t n) { return std::vector<int>(s.begin() + n, s.begin() + n + m); };
        const auto initial = state_at(0);
        if (state_at(period) != initial)
            throw std::invalid_argument("Polynomial " + hex(poly) + " does not generate an m-sequence.");
        for (std::size_t d = 1; d < period; ++d)
            if (period % d == 0 && state_at(d) == initial)
                throw std::invalid_argument("Polynomial " + hex(poly) + " does not generate an m-sequence (period " +
                                            std::to_string(d) + ").");
        s.resize(period);
        return s;
    }

    CodeSequence gen_gold(std::uint64_t poly_a, std::uint64_t poly_b, int shift)
    {
        const int m = polynomial_degree(poly_a);
        if (m != polynomial_degree(poly_b))
            throw std::invalid_argument("Gold: polynomials must share the same degree.");
        const auto a = bits_to_chips(m_sequence_bits(poly_a));
        const auto b = bits_to_chips(m_sequence_bits(poly_b));
        const int n = static_cast<int>(a.size());
        if (shift < 0 || shift >= n)
            throw std::invalid_argument("Gold: shift must be in [0, " + std::to_string(n - 1) + "].");

        // Preferred pair: cross-correlation takes only {-1, -1-t, -1+t}.
        const std::int64_t t = std::int64_t{1} << ((m + 2) / 2);
        const std::set<std::int64_t> allowed{-1, -1 - t, -1 + t};
        const auto xc = periodic_cross_correlation(a, b);
        std::set<std::int64_t> observed(xc.begin(), xc.end());
        const bool preferred =
            m % 4 != 0 && std::includes(allowed.begin(), allowed.end(), observed.begin(), observed.end());
        if (!preferred)
        {
            std::ostringstream os;
            os << "Gold: " << hex(poly_a) << " and " << hex(poly_b)
               << " are not a preferred pair; cross-correlation values {";
            bool first = true;
            for (auto v : observed)
            {
                os << (first ? "" : ", ") << v;
                first = false;
            }
            os << "} exceed {" << -1 - t << ", -1, " << -1 + t << "}.";
            throw std::invalid_argument(os.str());
        }

        std::vector<int> chips(a.size());
        for (int i = 0; i < n; ++i)
            chips[i] = a[i] * b[(i + shift) % n];
        return CodeSequence(std::move(chips), Family::Gold, GoldParams{poly_a, poly_b, shift});
    }

    namespace
    {
        // A_k(n) = W_k A_{k-1}(n) + B_{k-1}(n - D_k); B_k(n) = W_k A_{k-1}(n) - B_{k-1}(n - D_k)
        std::pair<std::vector<int>, std::vector<int>> golay_80211ad(std::span<const int> delays,
                                                                    std::span<const int> weights)
        {
            const std::size_t n = std::size_t{1} << delays.size();
            std::vector<int> a(n, 0), b(n, 0);
            a[0] = b[0] = 1;
            for (std::size_t k = 0; k < delays.size(); ++k)
            {
                const auto d = static_cast<std::size_t>(delays[k]);
                std::vector<int> na(n), nb(n);
                for (std::size_t i = 0; i < n; ++i)
                {
                    const int shifted = i >= d ? b[i - d] : 0;
                    na[i] = weights[k] * a[i] + shifted;
                    nb[i] = weights[k] * a[i] - shifted;
                }
                a = std::move(na);
                b = std::move(nb);
            }
            return {a, b};
        }

        constexpr int kGolay128Delays[] = {1, 8, 2, 4, 16, 32, 64};
        constexpr int kGolay128Weights[] = {-1, -1, -1, -1, 1, -1, -1};
    } // namespace

    CodeSequence gen_golay_a128()
    {
        auto [a, b] = golay_80211ad(kGolay128Delays, kGolay128Weights);
        return CodeSequence(std::move(a), Family::GolayA, GolayParams{128});
    }

    CodeSequence gen_golay_b128()
    {
        auto [a, b] = golay_80211ad(kGolay128Delays, kGolay128Weights);
        return CodeSequence(std::move(b), Family::GolayB, GolayParams{128});
    }

    std::pair<std::vector<int>, std::vector<int>> golay_pair(int length)
    {
        if (length < 1 || !std::has_single_bit(static_cast<unsigned>(length)))
            throw std::invalid_argument("Golay pair length must be a power of two.");
        std::vector<int> a{1}, b{1};
        while (static_cast<int>(a.size()) < length)
        {
            std::vector<int> na(a), nb(a);
            na.insert(na.end(), b.begin(), b.end());
            for (int v : b)
                nb.push_back(-v);
            a = std::move(na);
            b = std::move(nb);
        }
        return {a, b};
    }

    std::vector<int> ls_supported_lengths()
    {
        std::vector<int> out;
        for (int len = 4; len <= 4096; len *= 2)
            out.push_back(len);
        return out;
    }

    namespace
    {
        void require_ls_length(int length)
        {
            const auto supported = ls_supported_lengths();
            if (std::find(supported.begin(), supported.end(), length) != supported.end())
                return;
            std::ostringstream os;
            os << "LS code length " << length << " is not supported; supported lengths:";
            for (int l : supported)
                os << ' ' << l;
            throw std::invalid_argument(os.str());
        }
    } // namespace

    CodeSequence gen_ls(int length)
    {
        require_ls_length(length);
        auto [a, b] = golay_pair(length / 2);
        a.insert(a.end(), b.begin(), b.end());
        return CodeSequence(std::move(a), Family::Ls, LsParams{length});
    }

    std::vector<int> ls_padded(int length, int ifw)
    {
        require_ls_length(length);
        if (ifw < 0)
            throw std::invalid_argument("LS interference-free window must be non-negative.");
        auto [a, b] = golay_pair(length / 2);
        std::vector<int> out(a);
        out.insert(out.end(), static_cast<std::size_t>(ifw), 0);
        out.insert(out.end(), b.begin(), b.end());
        out.insert(out.end(), static_cast<std::size_t>(ifw), 0);
        return out;
    }

    std::vector<std::int64_t> periodic_cross_correlation(std::span<const int> a, std::span<const int> b)
    {
        if (a.size() != b.size())
            throw std::invalid_argument("periodic_cross_correlation: sequences must have equal length.");
        const std::size_t n = a.size();
        std::vector<std::int64_t> out(n, 0);
        for (std::size_t k = 0; k < n; ++k)
        {
            std::int64_t acc = 0;
            for (std::size_t i = 0; i < n; ++i)
                acc += a[i] * b[(i + k) % n];
            out[k] = acc;
        }
        return out;
    }

    std::vector<std::int64_t> periodic_autocorrelation(std::span<const int> chips)
    {
        return periodic_cross_correlation(chips, chips);
    }

    std::vector<std::int64_t> aperiodic_autocorrelation(std::span<const int> chips)
    {
        const std::size_t n = chips.size();
        std::vector<std::int64_t> out(n, 0);
        for (std::size_t k = 0; k < n; ++k)
        {
            std::int64_t acc = 0;
            for (std::size_t i = 0; i + k < n; ++i)
                acc += chips[i] * chips[i + k];
            out[k] = acc;
        }
        return out;
    }

    MeritReport merit_report(const CodeSequence &s)
    {
        const auto acf = periodic_autocorrelation(s);
        MeritReport r;
        r.peak = acf[0];
        for (std::size_t k = 1; k < acf.size(); ++k)
            r.max_off_peak_abs = std::max(r.max_off_peak_abs, acf[k] < 0 ? -acf[k] : acf[k]);
        r.peak_to_sidelobe_db = r.max_off_peak_abs == 0
                                    ? std::numeric_limits<double>::infinity()
                                    : 20.0 * std::log10(static_cast<double>(r.peak) / static_cast<double>(r.max_off_peak_abs));
        return r;
    }

    CodeSequence parse_code_spec(const std::string &spec)
    {
        std::vector<std::string> parts;
        std::stringstream ss(spec);
        for (std::string item; std::getline(ss, item, ':');)
            parts.push_back(item);
        if (parts.empty())
            throw std::invalid_argument("Empty code spec.");

        const std::string &family = parts[0];
        if (family == "glfsr" && parts.size() == 4)
            return gen_glfsr(static_cast<int>(parse_uint(parts[1])), parse_uint(parts[2]), parse_uint(parts[3]));
        if (family == "gold" && parts.size() == 4)
            return gen_gold(parse_uint(parts[1]), parse_uint(parts[2]), static_cast<int>(parse_uint(parts[3])));
        if (family == "golay" && parts.size() == 2 && parts[1] == "a128")
            return gen_golay_a128();
        if (family == "golay" && parts.size() == 2 && parts[1] == "b128")
            return gen_golay_b128();
        if (family == "ls" && parts.size() == 2)
            return gen_ls(static_cast<int>(parse_uint(parts[1])));
        throw std::invalid_argument("Unrecognized code spec '" + spec +
                                    "'; expected glfsr:D:MASK:SEED, gold:PA:PB:SHIFT, golay:a128|b128 or ls:LEN.");
    }

} // namespace twinchan::seq
