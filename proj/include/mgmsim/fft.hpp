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

#ifndef MGMSIM_FFT_HPP
#define MGMSIM_FFT_HPP

#include "mgmsim/signal.hpp"

#include <span>

namespace mgmsim
{
    // Unitary DFT pair, scale 1/sqrt(n) in both directions. Any length is
    // accepted; plans are cached per (length, direction) and the transforms
    // are safe to call from concurrent threads.
    void fft_inplace(std::span<cplx> x);
    void ifft_inplace(std::span<cplx> x);

    std::vector<cplx> fft(std::span<const cplx> x);
    std::vector<cplx> ifft(std::span<const cplx> x);

    /// Smallest 2^a 3^b 5^c not below n.
    std::size_t fast_fft_size(std::size_t n);

    /// Delay by `delay` samples (fractional allowed) with a linear phase ramp
    /// over the DFT of the whole sequence. The shift is circular.
    void delay_inplace(std::span<cplx> x, double delay);
}

#endif
