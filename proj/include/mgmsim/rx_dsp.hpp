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

#ifndef MGMSIM_RX_DSP_HPP
#define MGMSIM_RX_DSP_HPP

#include "mgmsim/dmt.hpp"
#include "mgmsim/signal.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mgmsim
{
    using SymbolBlock = std::vector<std::vector<cplx>>; // [symbol][subcarrier]

    struct ChannelEstimate
    {
        std::vector<cplx> h;     // per payload subcarrier
        std::vector<double> snr; // linear, clamped to [snr_floor, snr_cap]
    };

    constexpr double snr_floor = 1e-6;
    constexpr double snr_cap = 1e12;

    enum class CombinerMode
    {
        single_plus,
        single_minus,
        erc,
        mrc,
    };

    std::string to_string(CombinerMode m);
    CombinerMode parse_combiner(const std::string &name); // throws std::invalid_argument

    /// Raised when no lag reaches the normalized-correlation threshold.
    class SyncLost : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Rational sample-rate change by p/q with a Kaiser-windowed sinc
    /// polyphase filter (64 taps per phase, about 100 dB stopband).
    /// The output is time aligned with the input: y[m] ~ x(m q / p).
    ComplexWaveform resample_rational(const ComplexWaveform &w, int p, int q);

    struct SyncResult
    {
        std::size_t start;
        double peak; // normalized correlation at `start`
    };

    constexpr double sync_threshold = 0.5;

    /// Lag maximizing |sum w[n+t] conj(ref[n])| / (|w window| |ref|).
    SyncResult synchronize(const ComplexWaveform &w, std::span<const cplx> sync_ref);

    ChannelEstimate estimate_channel(const SymbolBlock &train_rx, const SymbolBlock &train_tx);

    /// One-tap equalizer. Bins with zero estimated gain are zeroed; their SNR
    /// is already at the floor, so combining ignores them.
    SymbolBlock equalize(const SymbolBlock &rx, const ChannelEstimate &est);

    SymbolBlock combine(const SymbolBlock &y_plus, const SymbolBlock &y_minus, const ChannelEstimate &est_plus,
                        const ChannelEstimate &est_minus, CombinerMode mode);

    /// Output of the single-branch chain: normalization, synchronization,
    /// DFT demultiplexing, training-based estimation and equalization.
    struct BranchRx
    {
        bool synced = false;     // false when the fallback start was used
        std::size_t frame_start = 0;
        SymbolBlock data;        // equalized payload symbols
        ChannelEstimate est;
    };

    struct BranchRxOptions
    {
        int sync_backoff = -1;                     // samples taken into the CP, -1 = cp_len/2
        std::optional<std::size_t> fallback_start; // used when synchronization fails
    };

    BranchRx receive_branch(const ComplexWaveform &w, const DmtConfig &cfg, std::span<const cplx> sync_ref,
                            const SymbolBlock &pilots, const BranchRxOptions &opt = {});
}

#endif
