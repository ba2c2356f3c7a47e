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

#include "mgmsim/xtalk.hpp"

#include <doctest.h>

#include <algorithm>
#include <stdexcept>

using namespace mgmsim;

namespace
{
    // Independent reference: average both directions in linear power and
    // subtract the short system from the long one.
    double fiber_xt_reference(const CrosstalkTable &s, const CrosstalkTable &l, int a, int b)
    {
        auto lin = [](double db) { return std::pow(10.0, db / 10.0); };
        double ls = 0.5 * (lin(s.at(a, b)) + lin(s.at(b, a)));
        double ll = 0.5 * (lin(l.at(a, b)) + lin(l.at(b, a)));
        return 10.0 * std::log10(ll - ls);
    }
}

TEST_CASE("embedded tables")
{
    auto t1 = table_1km(), t2 = table_18km();
    CHECK_NOTHROW(t1.validate());
    CHECK_NOTHROW(t2.validate());
    CHECK(t1.groups == std::vector<int>{1, 2, 3, 4});
    CHECK(t2.groups == std::vector<int>{2, 3, 4});
    CHECK(t2.system_length_km == doctest::Approx(18.4));
    CHECK(t1.at(1, 2) == doctest::Approx(-4.43));
    CHECK(t1.at(4, 3) == doctest::Approx(-13.80));
    CHECK(t2.at(3, 4) == doctest::Approx(-8.68));
    CHECK(t2.at(4, 2) == doctest::Approx(-8.39));
    CHECK(t1.at(3, 3) == 0.0);
    CHECK_THROWS_AS(t2.at(1, 2), std::invalid_argument);
}

TEST_CASE("fiber-only crosstalk over the 17.4 km difference")
{
    auto t1 = table_1km(), t2 = table_18km();
    auto p34 = fiber_only_xt(t1, t2, 3, 4);
    auto p23 = fiber_only_xt(t1, t2, 2, 3);
    CHECK(p34.delta_length_km == doctest::Approx(17.4));
    CHECK(p34.xt_db == doctest::Approx(fiber_xt_reference(t1, t2, 3, 4)).epsilon(1e-12));
    CHECK(p23.xt_db == doctest::Approx(fiber_xt_reference(t1, t2, 2, 3)).epsilon(1e-12));
    CHECK(std::abs(p34.xt_db - (-9.65)) <= 0.05);
    CHECK(std::abs(p23.xt_db - (-7.58)) <= 0.05);
    CHECK(xt_at_length(p34.xt_db_per_km, 17.4) == doctest::Approx(p34.xt_db));
    CHECK(fiber_only_xt(t1, t2, 4, 3).xt_db == doctest::Approx(p34.xt_db));
    CHECK_THROWS_AS(fiber_only_xt(t2, t1, 3, 4), std::invalid_argument);
    CHECK_THROWS_AS(fiber_only_xt(t1, t2, 3, 3), std::invalid_argument);
    // a longer system with less crosstalk has a negative linear difference
    auto quiet = t2;
    quiet.xt_db[1][2] = quiet.xt_db[2][1] = -40.0;
    CHECK_THROWS_AS(fiber_only_xt(t1, quiet, 3, 4), std::domain_error);
}

TEST_CASE("linear accumulation in length")
{
    CHECK(xt_at_length(-20.0, 10.0) == doctest::Approx(-10.0));
    CHECK(xt_at_length(-20.0, 1.0) == doctest::Approx(-20.0));
}

TEST_CASE("uncoupled table and validation")
{
    auto t = CrosstalkTable::none({3, 4});
    CHECK(t.at(3, 3) == 0.0);
    CHECK(std::isinf(t.at(3, 4)));
    CHECK(t.contains(4));
    CHECK(!t.contains(2));

    auto bad = table_18km();
    bad.xt_db[0][1] = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = table_18km();
    bad.xt_db.pop_back();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("csv export")
{
    auto csv = to_csv(table_18km());
    CHECK(csv.find("-8.68") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') >= 4);
}
