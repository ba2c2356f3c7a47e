// SPDX-License-Identifier: Apache-2.0
//
// mgmsim: link-level simulator for mode-group multiplexed IM-DD transmission
// Copyright (C) 2026 The mgmsim Authors
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

#include "mgmsim/signal.hpp"

#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace mgmsim
{
    namespace
    {
        std::uint64_t splitmix64(std::uint64_t x)
        {
            x += 0x9E3779B97F4A7C15ULL;
            x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
            x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
            return x ^ (x >> 31);
        }
    }

    Seed Seed::derive(std::initializer_list<std::uint64_t> path) const
    {
        std::uint64_t s = splitmix64(value);
        for (auto p : path)
            s = splitmix64(s ^ splitmix64(p + 0x632BE59BD9B4E019ULL));
        return Seed{s};
    }

    QamConstellation::QamConstellation(int order) : order_(order)
    {
        if (order != 4 && order != 16)
            throw std::invalid_argument("QAM order must be 4 or 16, got " + std::to_string(order));
        bits_per_symbol_ = order == 4 ? 2 : 4;
        levels_per_axis_ = order == 4 ? 2 : 4;
        // Average energy of an M-ary square grid with odd-integer levels is 2(M-1)/3.
        scale_ = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);

        const int axis_bits = bits_per_symbol_ / 2;
        points_.resize(order);
        for (unsigned label = 0; label < unsigned(order); ++label)
        {
            unsigned gi = label >> axis_bits;
            unsigned gq = label & ((1u << axis_bits) - 1u);
            auto level = [&](unsigned gray) {
                unsigned idx = 0; // Gray -> binary, index 0 is the most positive level
                for (unsigned g = gray; g; g >>= 1)
                    idx ^= g;
                return double(levels_per_axis_ - 1 - 2 * int(idx));
            };
            points_[label] = cplx(level(gi), level(gq)) * scale_;
        }
    }

    unsigned QamConstellation::decide_axis(double x) const
    {
        unsigned best_gray = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (int idx = 0; idx < levels_per_axis_; ++idx)
        {
            double lvl = double(levels_per_axis_ - 1 - 2 * idx) * scale_;
            double d = std::abs(x - lvl);
            unsigned gray = unsigned(idx) ^ (unsigned(idx) >> 1);
            if (d < best_dist || (d == best_dist && gray < best_gray))
            {
                best_dist = d;
                best_gray = gray;
            }
        }
        return best_gray;
    }

    unsigned QamConstellation::decide(cplx symbol) const
    {
        const int axis_bits = bits_per_symbol_ / 2;
        return (decide_axis(symbol.real()) << axis_bits) | decide_axis(symbol.imag());
    }

    std::vector<cplx> qam_map(std::span<const std::uint8_t> bits, const QamConstellation &c)
    {
        const std::size_t k = std::size_t(c.bits_per_symbol());
        if (bits.size() % k != 0)
            throw std::invalid_argument("qam_map: bit count " + std::to_string(bits.size()) +
                                        " is not a multiple of " + std::to_string(k));
        std::vector<cplx> out(bits.size() / k);
        for (std::size_t s = 0; s < out.size(); ++s)
        {
            unsigned label = 0;
            for (std::size_t b = 0; b < k; ++b)
                label = (label << 1) | (bits[s * k + b] & 1u);
            out[s] = c.point(label);
        }
        return out;
    }

    BitStream qam_demap(std::span<const cplx> symbols, const QamConstellation &c)
    {
        const int k = c.bits_per_symbol();
        BitStream out(symbols.size() * std::size_t(k));
        for (std::size_t s = 0; s < symbols.size(); ++s)
        {
            unsigned label = c.decide(symbols[s]);
            for (int b = 0; b < k; ++b)
                out[s * k + b] = std::uint8_t((label >> (k - 1 - b)) & 1u);
        }
        return out;
    }

    double mean_power(std::span<const cplx> x)
    {
        if (x.empty())
            throw std::invalid_argument("mean_power: empty waveform");
        double acc = 0.0;
        for (const auto &v : x)
            acc += std::norm(v);
        return acc / double(x.size());
    }

    double mean_power(const ComplexWaveform &w) { return mean_power(std::span<const cplx>(w.samples)); }

    BitStream random_bits(std::size_t count, Seed seed)
    {
        std::mt19937_64 rng(seed.value);
        BitStream out(count);
        std::uint64_t word = 0;
        for (std::size_t i = 0; i < count; ++i)
        {
            if (i % 64 == 0)
                word = rng();
            out[i] = std::uint8_t(word & 1u);
            word >>= 1;
        }
        return out;
    }
}
