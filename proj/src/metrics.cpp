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

#include "mgmsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mgmsim
{
    BerCount count_ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx)
    {
        if (tx.size() != rx.size())
            throw std::invalid_argument("count_ber: streams differ in length");
        BerCount c;
        c.bits = tx.size();
        for (std::size_t i = 0; i < tx.size(); ++i)
            c.errors += (tx[i] & 1u) != (rx[i] & 1u);
        return c;
    }

    double evm(std::span<const cplx> rx, std::span<const cplx> ref)
    {
        if (rx.empty() || ref.empty())
            throw std::invalid_argument("evm: empty input");
        if (rx.size() != ref.size())
            throw std::invalid_argument("evm: length mismatch");
        double err = 0.0, pref = 0.0;
        for (std::size_t i = 0; i < rx.size(); ++i)
        {
            err += std::norm(rx[i] - ref[i]);
            pref += std::norm(ref[i]);
        }
        if (pref <= 0.0)
            throw std::invalid_argument("evm: reference has no power");
        return std::sqrt(err / pref);
    }

    std::vector<CurvePoint> isotonic_decreasing(std::vector<CurvePoint> curve)
    {
        std::sort(curve.begin(), curve.end(), [](auto &a, auto &b) { return a.rop_dbm < b.rop_dbm; });
        struct Block
        {
            double sum;
            std::size_t n;
        };
        std::vector<Block> blocks;
        for (const auto &p : curve)
        {
            blocks.push_back({p.ber, 1});
            while (blocks.size() > 1)
            {
                auto &b = blocks[blocks.size() - 1];
                auto &a = blocks[blocks.size() - 2];
                if (a.sum / double(a.n) >= b.sum / double(b.n))
                    break;
                a.sum += b.sum;
                a.n += b.n;
                blocks.pop_back();
            }
        }
        std::size_t i = 0;
        for (const auto &b : blocks)
            for (std::size_t j = 0; j < b.n; ++j)
                curve[i++].ber = b.sum / double(b.n);
        return curve;
    }

    std::optional<double> sensitivity_at_threshold(std::vector<CurvePoint> curve, double threshold, bool isotonic)
    {
        if (!(threshold > 0.0))
            throw std::invalid_argument("sensitivity_at_threshold: threshold must be positive");
        std::erase_if(curve, [](const CurvePoint &p) { return !(p.ber > 0.0); });
        std::sort(curve.begin(), curve.end(), [](auto &a, auto &b) { return a.rop_dbm < b.rop_dbm; });
        if (isotonic)
            curve = isotonic_decreasing(std::move(curve));
        if (curve.empty())
            return std::nullopt;

        const double lt = std::log10(threshold);
        for (std::size_t i = 0; i + 1 < curve.size(); ++i)
        {
            const double l0 = std::log10(curve[i].ber), l1 = std::log10(curve[i + 1].ber);
            if (l0 >= lt && l1 <= lt && l0 != l1)
                return curve[i].rop_dbm + (lt - l0) / (l1 - l0) * (curve[i + 1].rop_dbm - curve[i].rop_dbm);
            if (l0 == lt)
                return curve[i].rop_dbm;
        }
        if (std::log10(curve.back().ber) == lt)
            return curve.back().rop_dbm;
        return std::nullopt;
    }
}
