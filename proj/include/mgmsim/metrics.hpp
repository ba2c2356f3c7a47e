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

#ifndef MGMSIM_METRICS_HPP
#define MGMSIM_METRICS_HPP

#include "mgmsim/rx_dsp.hpp"
#include "mgmsim/signal.hpp"

#include <optional>
#include <vector>

namespace mgmsim
{
    struct BerCount
    {
        std::size_t errors = 0;
        std::size_t bits = 0;
        double ber() const { return bits ? double(errors) / double(bits) : 0.0; }
    };

    BerCount count_ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx);

    double evm(std::span<const cplx> rx, std::span<const cplx> ref);

    struct SubcarrierStat
    {
        double snr_db;
        double ber;
    };

    struct LinkReport
    {
        int mg = 0;
        CombinerMode combiner = CombinerMode::mrc;
        double rop_dbm = 0.0;
        std::size_t errors = 0;
        std::size_t bit_count = 0;
        double evm_rms = 0.0;
        std::vector<SubcarrierStat> per_subcarrier;

        double ber() const { return bit_count ? double(errors) / double(bit_count) : 0.0; }
    };

    struct CurvePoint
    {
        double rop_dbm;
        double ber;
    };

    /// Non-increasing least-squares fit of BER over ROP (pool adjacent violators).
    std::vector<CurvePoint> isotonic_decreasing(std::vector<CurvePoint> curve);

    /// ROP where log10(BER) crosses log10(threshold), linearly interpolated
    /// between neighbouring points. Zero-BER points are dropped. Empty when
    /// the threshold lies outside the curve's BER range.
    std::optional<double> sensitivity_at_threshold(std::vector<CurvePoint> curve, double threshold,
                                                   bool isotonic = true);

    constexpr double fec_threshold = 3.8e-3;
}

#endif
