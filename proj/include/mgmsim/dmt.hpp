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

#ifndef MGMSIM_DMT_HPP
#define MGMSIM_DMT_HPP

#include "mgmsim/signal.hpp"

#include <limits>
#include <vector>

namespace mgmsim
{
    /// Geometry of a DMT frame. The payload occupies bins [k_lo, k_hi]; their
    /// conjugates occupy [N-k_hi, N-k_lo]. DC and Nyquist stay empty.
    struct DmtConfig
    {
        int fft_size = 2048;
        int k_lo = 9;
        int k_hi = 264;
        int cp_len = 48;
        double clip_ratio = 3.5; // multiple of RMS, infinity disables clipping
        int n_sync = 1;
        int n_train = 10;
        int n_data = 8;
        int qam_order = 4;
        double dac_rate = 60e9; // metadata, Hz

        void validate() const; // throws std::invalid_argument

        int band_size() const { return k_hi - k_lo + 1; }
        int symbol_length() const { return fft_size + cp_len; }
        int n_symbols() const { return n_sync + n_train + n_data; }
        std::size_t frame_length() const { return std::size_t(n_symbols()) * std::size_t(symbol_length()); }
        std::size_t payload_bits() const;

        /// Time-domain gain that brings a unit-power loaded band to unit RMS.
        double waveform_scale() const;

        bool operator==(const DmtConfig &) const = default;
    };

    constexpr double no_clipping = std::numeric_limits<double>::infinity();

    struct DmtFrame
    {
        BitStream tx_bits;
        std::vector<std::vector<cplx>> tx_symbols; // sync, training, then data; one vector per DMT symbol
        ComplexWaveform waveform;                  // real valued
    };

    std::vector<cplx> hermitian_load(std::span<const cplx> payload, const DmtConfig &cfg);

    /// IFFT of a Hermitian spectrum followed by cyclic-prefix insertion.
    std::vector<cplx> dmt_symbol(std::span<const cplx> spectrum, const DmtConfig &cfg);

    ComplexWaveform clip(const ComplexWaveform &w, double ratio);

    /// Pilot content known to the receiver: `n_sync + n_train` QPSK vectors.
    std::vector<std::vector<cplx>> training_symbols(const DmtConfig &cfg, Seed seed);

    /// Unclipped, scaled time samples of the first synchronization symbol.
    std::vector<cplx> sync_reference(const DmtConfig &cfg, Seed seed);

    DmtFrame build_frame(const BitStream &bits, const DmtConfig &cfg, Seed seed);

    /// Per-symbol payload bins of every DMT symbol of a frame starting at
    /// `frame_start`, scaled back to the constellation domain.
    std::vector<std::vector<cplx>> extract_subcarriers(const ComplexWaveform &w, const DmtConfig &cfg,
                                                       std::size_t frame_start);
}

#endif
