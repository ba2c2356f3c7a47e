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

#ifndef MGMSIM_XTALK_HPP
#define MGMSIM_XTALK_HPP

#include <cmath>
#include <string>
#include <vector>

namespace mgmsim
{
    /// Static inter-group crosstalk in dB, row = source group, column =
    /// destination group. Diagonal entries are 0 dB; -infinity marks an
    /// uncoupled pair.
    struct CrosstalkTable
    {
        std::vector<int> groups; // |l| per row/column
        std::vector<std::vector<double>> xt_db;
        double system_length_km = 0.0;
        std::string label;

        void validate() const; // throws std::invalid_argument
        bool contains(int group) const;
        double at(int source, int destination) const;

        /// No coupling between any of `groups`.
        static CrosstalkTable none(std::vector<int> groups);

        bool operator==(const CrosstalkTable &) const = default;
    };

    /// Measured system crosstalk with 1 km of ring-core fiber, |l| = 1..4.
    CrosstalkTable table_1km();
    /// Measured system crosstalk with 18.4 km of ring-core fiber, |l| = 2..4.
    CrosstalkTable table_18km();

    struct FiberCrosstalk
    {
        double delta_length_km; // long minus short system length
        double xt_db;           // accumulated over delta_length_km
        double xt_db_per_km;
    };

    /// Crosstalk attributable to the extra fiber between two measured
    /// systems, averaged over both directions of the pair in linear power.
    FiberCrosstalk fiber_only_xt(const CrosstalkTable &short_system, const CrosstalkTable &long_system,
                                 int group_a, int group_b);

    /// Crosstalk after `length_km` of fiber under linear power accumulation.
    inline double xt_at_length(double xt_db_per_km, double length_km)
    {
        return xt_db_per_km + 10.0 * std::log10(length_km);
    }

    std::string to_csv(const CrosstalkTable &t);
}

#endif
