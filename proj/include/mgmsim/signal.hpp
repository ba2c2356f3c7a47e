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

#ifndef MGMSIM_SIGNAL_HPP
#define MGMSIM_SIGNAL_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace mgmsim
{
    using cplx = std::complex<double>;

    /// Hard-decision bits, one value in {0,1} per element.
    using BitStream = std::vector<std::uint8_t>;

    /// Uniformly sampled complex baseband sequence.
    struct ComplexWaveform
    {
        std::vector<cplx> samples;
        double sample_rate = 1.0; // Hz

        std::size_t size() const { return samples.size(); }
    };

    /// Root of all pseudo-random streams in a simulation.
    ///
    /// Sub-streams are derived with `derive`, which chains a splitmix64 step
    /// per path element, so (base, path) fully determines the child seed
    /// independently of evaluation order or thread count.
    struct Seed
    {
        std::uint64_t value = 0;

        Seed derive(std::initializer_list<std::uint64_t> path) const;
        bool operator==(const Seed &) const = default;
    };

    /// Square Gray-labelled QAM grid (orders 4 and 16), unit average power.
    ///
    /// Labels are integers with the first transmitted bit as MSB. The upper
    /// half of the label bits selects the in-phase level, the lower half the
    /// quadrature level. On each axis the levels are Gray coded from the most
    /// positive level downwards, so label 00 of QPSK sits at (+1+j)/sqrt(2)
    /// and the sign bit of each axis is 0 for positive amplitudes:
    ///
    ///     QPSK axis:  +1 -> 0,  -1 -> 1
    ///     16QAM axis: +3 -> 00, +1 -> 01, -1 -> 11, -3 -> 10
    class QamConstellation
    {
    public:
        explicit QamConstellation(int order = 4);

        int order() const { return order_; }
        int bits_per_symbol() const { return bits_per_symbol_; }
        const std::vector<cplx> &points() const { return points_; } // indexed by label

        cplx point(unsigned label) const { return points_.at(label); }

        /// Nearest point label; equidistant candidates resolve to the smaller label.
        unsigned decide(cplx symbol) const;

    private:
        unsigned decide_axis(double x) const;

        int order_;
        int bits_per_symbol_;
        int levels_per_axis_;
        double scale_; // spacing normalization, points are odd multiples of scale_
        std::vector<cplx> points_;
    };

    std::vector<cplx> qam_map(std::span<const std::uint8_t> bits, const QamConstellation &c);
    BitStream qam_demap(std::span<const cplx> symbols, const QamConstellation &c);

    double mean_power(const ComplexWaveform &w);
    double mean_power(std::span<const cplx> x);

    /// Uniform random bits from `seed`.
    BitStream random_bits(std::size_t count, Seed seed);

    inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
    inline double lin_to_db(double lin) { return 10.0 * std::log10(lin); }
}

#endif
