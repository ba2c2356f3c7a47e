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

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mgmsim
{
    void CrosstalkTable::validate() const
    {
        const std::size_t n = groups.size();
        if (xt_db.size() != n)
            throw std::invalid_argument("crosstalk table '" + label + "' must have one row per group");
        for (std::size_t i = 0; i < n; ++i)
        {
            if (xt_db[i].size() != n)
                throw std::invalid_argument("crosstalk table '" + label + "' must be square");
            for (std::size_t j = 0; j < n; ++j)
            {
                double v = xt_db[i][j];
                if (i == j && v != 0.0)
                    throw std::invalid_argument("crosstalk table '" + label + "' diagonal must be 0 dB");
                if (i != j && !(v < 0.0))
                    throw std::invalid_argument("crosstalk table '" + label + "' off-diagonal entries must be below 0 dB");
            }
        }
        auto sorted = groups;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("crosstalk table '" + label + "' lists a group twice");
    }

    bool CrosstalkTable::contains(int group) const
    {
        return std::find(groups.begin(), groups.end(), group) != groups.end();
    }

    double CrosstalkTable::at(int source, int destination) const
    {
        auto index = [&](int g) {
            auto it = std::find(groups.begin(), groups.end(), g);
            if (it == groups.end())
                throw std::invalid_argument("mode group |l|=" + std::to_string(g) + " is not in crosstalk table '" +
                                            label + "'");
            return std::size_t(it - groups.begin());
        };
        return xt_db[index(source)][index(destination)];
    }

    CrosstalkTable CrosstalkTable::none(std::vector<int> groups)
    {
        const double off = -std::numeric_limits<double>::infinity();
        CrosstalkTable t;
        t.groups = std::move(groups);
        t.xt_db.assign(t.groups.size(), std::vector<double>(t.groups.size(), off));
        for (std::size_t i = 0; i < t.groups.size(); ++i)
            t.xt_db[i][i] = 0.0;
        t.label = "none";
        return t;
    }

    CrosstalkTable table_1km()
    {
        return CrosstalkTable{{1, 2, 3, 4},
                              {{0.0, -4.43, -15.03, -18.57},
                               {-5.09, 0.0, -11.26, -18.04},
                               {-17.36, -11.94, 0.0, -14.05},
                               {-20.99, -17.29, -13.8, 0.0}},
                              1.0,
                              "table_1km"};
    }

    CrosstalkTable table_18km()
    {
        return CrosstalkTable{{2, 3, 4},
                              {{0.0, -5.19, -7.66},
                               {-7.33, 0.0, -8.68},
                               {-8.39, -7.9, 0.0}},
                              18.4,
                              "table_18km"};
    }

    FiberCrosstalk fiber_only_xt(const CrosstalkTable &short_system, const CrosstalkTable &long_system,
                                 int group_a, int group_b)
    {
        if (group_a == group_b)
            throw std::invalid_argument("fiber_only_xt: pair must name two different groups");
        const double delta = long_system.system_length_km - short_system.system_length_km;
        if (!(delta > 0.0))
            throw std::invalid_argument("fiber_only_xt: long system must be longer than short system");

        double sum = 0.0;
        for (auto [src, dst] : {std::pair{group_a, group_b}, std::pair{group_b, group_a}})
        {
            double x = std::pow(10.0, long_system.at(src, dst) / 10.0) - std::pow(10.0, short_system.at(src, dst) / 10.0);
            if (!(x > 0.0))
                throw std::domain_error("fiber_only_xt: long system shows no excess crosstalk for " +
                                        std::to_string(src) + "->" + std::to_string(dst));
            sum += x;
        }
        FiberCrosstalk r;
        r.delta_length_km = delta;
        r.xt_db = 10.0 * std::log10(sum / 2.0);
        r.xt_db_per_km = r.xt_db - 10.0 * std::log10(delta);
        return r;
    }

    std::string to_csv(const CrosstalkTable &t)
    {
        std::ostringstream os;
        os << "source\\destination";
        for (int g : t.groups)
            os << "," << g;
        os << "\n";
        for (std::size_t i = 0; i < t.groups.size(); ++i)
        {
            os << t.groups[i];
            for (double v : t.xt_db[i])
                os << "," << v;
            os << "\n";
        }
        return os.str();
    }
}
