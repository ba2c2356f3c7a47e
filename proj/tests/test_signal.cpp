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

#include <doctest.h>

#include <bit>
#include <numeric>
#include <set>

using namespace mgmsim;

TEST_CASE("qpsk labels follow the axis Gray code")
{
    QamConstellation c(4);
    const double a = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(c.point(0b00) - cplx(a, a)) < 1e-15);
    CHECK(std::abs(c.point(0b01) - cplx(a, -a)) < 1e-15);
    CHECK(std::abs(c.point(0b10) - cplx(-a, a)) < 1e-15);
    CHECK(std::abs(c.point(0b11) - cplx(-a, -a)) < 1e-15);
}

TEST_CASE("16qam axis levels and unit power")
{
    QamConstellation c(16);
    CHECK(c.bits_per_symbol() == 4);
    const double s = 1.0 / std::sqrt(10.0);
    // high bit pair selects I: 00 -> +3, 01 -> +1, 11 -> -1, 10 -> -3
    const double level[4] = {3, 1, -3, -1};
    for (unsigned lab = 0; lab < 16; ++lab)
    {
        CHECK(c.point(lab).real() == doctest::Approx(level[lab >> 2] * s));
        CHECK(c.point(lab).imag() == doctest::Approx(level[lab & 3] * s));
    }
    double p = 0.0;
    for (auto z : c.points())
        p += std::norm(z);
    CHECK(p / 16.0 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("nearest neighbours differ in exactly one bit")
{
    for (int order : {4, 16})
    {
        QamConstellation c(order);
        const auto &pts = c.points();
        double dmin = 1e9;
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                dmin = std::min(dmin, std::abs(pts[i] - pts[j]));
        int pairs = 0;
        for (unsigned i = 0; i < pts.size(); ++i)
            for (unsigned j = i + 1; j < pts.size(); ++j)
                if (std::abs(pts[i] - pts[j]) < dmin * (1 + 1e-9))
                {
                    ++pairs;
                    CHECK(std::popcount(i ^ j) == 1);
                }
        // a k x k grid has 2 k (k - 1) adjacent pairs
        const int k = order == 4 ? 2 : 4;
        CHECK(pairs == 2 * k * (k - 1));
    }
}

TEST_CASE("decisions: exact points, noise inside the cell, ties")
{
    QamConstellation q16(16);
    for (unsigned lab = 0; lab < 16; ++lab)
    {
        CHECK(q16.decide(q16.point(lab)) == lab);
        CHECK(q16.decide(q16.point(lab) + cplx(0.1, -0.1)) == lab);
    }
    QamConstellation q4(4);
    CHECK(q4.decide(cplx(0, 0)) == 0u);
    CHECK(q4.decide(cplx(-0.5, 0)) == 0b10u);
    // 16QAM at the origin: each axis ties between +1 (01) and -1 (11), smaller wins
    CHECK(q16.decide(cplx(0, 0)) == 0b0101u);
}

TEST_CASE("map and demap round trip")
{
    for (int order : {4, 16})
    {
        QamConstellation c(order);
        auto bits = random_bits(std::size_t(c.bits_per_symbol()) * 1000, Seed{7});
        auto sym = qam_map(bits, c);
        CHECK(sym.size() == 1000);
        CHECK(qam_demap(sym, c) == bits);
    }
    QamConstellation c(16);
    BitStream odd(6, 0);
    CHECK_THROWS_AS(qam_map(odd, c), std::invalid_argument);
    CHECK_THROWS_AS(QamConstellation(8), std::invalid_argument);
}

TEST_CASE("seeds")
{
    Seed s{42};
    CHECK(s.derive({1, 2}) == s.derive({1, 2}));
    CHECK(!(s.derive({1, 2}) == s.derive({2, 1})));
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i)
        seen.insert(s.derive({3, i}).value);
    CHECK(seen.size() == 1000);

    auto bits = random_bits(100000, Seed{1});
    CHECK(bits == random_bits(100000, Seed{1}));
    const double ones = std::accumulate(bits.begin(), bits.end(), 0.0);
    CHECK(std::abs(ones / 1e5 - 0.5) < 5.0 * std::sqrt(0.25 / 1e5));
}

TEST_CASE("mean power")
{
    ComplexWaveform w;
    CHECK_THROWS_AS(mean_power(w), std::invalid_argument);
    w.samples = {cplx(1, 1), cplx(0, 2)};
    CHECK(mean_power(w) == doctest::Approx(3.0));
    CHECK(db_to_lin(lin_to_db(0.123)) == doctest::Approx(0.123));
}
