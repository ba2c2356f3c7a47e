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

#include "mgmsim/dmt.hpp"
#include "mgmsim/fft.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mgmsim
{
    void DmtConfig::validate() const
    {
        if (fft_size <= 0 || fft_size % 2 != 0)
            throw std::invalid_argument("fft_size must be a positive even integer");
        if (k_lo < 1 || k_lo > k_hi || k_hi >= fft_size / 2)
            throw std::invalid_argument("payload band must satisfy 1 <= k_lo <= k_hi < fft_size/2");
        if (cp_len < 0 || cp_len >= fft_size)
            throw std::invalid_argument("cp_len must lie in [0, fft_size)");
        if (!(clip_ratio > 0.0))
            throw std::invalid_argument("clip_ratio must be positive");
        if (n_sync < 1)
            throw std::invalid_argument("n_sync must be at least 1");
        if (n_train < 2)
            throw std::invalid_argument("n_train must be at least 2");
        if (n_data < 0)
            throw std::invalid_argument("n_data must be non-negative");
        QamConstellation check(qam_order);
        (void)check;
        if (!(dac_rate > 0.0))
            throw std::invalid_argument("dac_rate must be positive");
    }

    std::size_t DmtConfig::payload_bits() const
    {
        int bps = qam_order == 16 ? 4 : 2;
        return std::size_t(n_data) * std::size_t(band_size()) * std::size_t(bps);
    }

    double DmtConfig::waveform_scale() const { return std::sqrt(double(fft_size) / (2.0 * band_size())); }

    std::vector<cplx> hermitian_load(std::span<const cplx> payload, const DmtConfig &cfg)
    {
        if (payload.size() != std::size_t(cfg.band_size()))
            throw std::invalid_argument("hermitian_load: payload length " + std::to_string(payload.size()) +
                                        " does not match band size " + std::to_string(cfg.band_size()));
        const int n = cfg.fft_size;
        std::vector<cplx> spec(std::size_t(n), cplx{});
        for (int k = cfg.k_lo; k <= cfg.k_hi; ++k)
        {
            cplx v = payload[std::size_t(k - cfg.k_lo)];
            spec[std::size_t(k)] = v;
            spec[std::size_t(n - k)] = std::conj(v);
        }
        return spec;
    }

    std::vector<cplx> dmt_symbol(std::span<const cplx> spectrum, const DmtConfig &cfg)
    {
        const std::size_t n = std::size_t(cfg.fft_size);
        if (spectrum.size() != n)
            throw std::invalid_argument("dmt_symbol: spectrum length must equal fft_size");

        double peak = 0.0, asym = 0.0;
        for (std::size_t k = 0; k < n; ++k)
        {
            peak = std::max(peak, std::abs(spectrum[k]));
            asym = std::max(asym, std::abs(spectrum[k] - std::conj(spectrum[(n - k) % n])));
        }
        if (asym > 1e-12 * std::max(1.0, peak))
            throw std::invalid_argument("dmt_symbol: spectrum is not Hermitian symmetric");

        std::vector<cplx> body = ifft(spectrum);
        const std::size_t cp = std::size_t(cfg.cp_len);
        std::vector<cplx> out(n + cp);
        for (std::size_t i = 0; i < n; ++i)
        {
            if (std::abs(body[i].imag()) > 1e-9)
                throw std::logic_error("dmt_symbol: inverse transform left an imaginary residue above 1e-9");
            out[cp + i] = cplx(body[i].real(), 0.0);
        }
        std::copy(out.end() - std::ptrdiff_t(cp), out.end(), out.begin());
        return out;
    }

    ComplexWaveform clip(const ComplexWaveform &w, double ratio)
    {
        if (!(ratio > 0.0))
            throw std::invalid_argument("clip: ratio must be positive");
        if (std::isinf(ratio) || w.samples.empty())
            return w;
        const double limit = ratio * std::sqrt(mean_power(w));
        ComplexWaveform out = w;
        for (auto &s : out.samples)
            s = cplx(std::clamp(s.real(), -limit, limit), s.imag());
        return out;
    }

    std::vector<std::vector<cplx>> training_symbols(const DmtConfig &cfg, Seed seed)
    {
        const QamConstellation qpsk(4);
        const int count = cfg.n_sync + cfg.n_train;
        std::vector<std::vector<cplx>> out;
        out.reserve(std::size_t(count));
        for (int t = 0; t < count; ++t)
        {
            BitStream bits = random_bits(std::size_t(2 * cfg.band_size()), seed.derive({0x7261696eULL, std::uint64_t(t)}));
            out.push_back(qam_map(bits, qpsk));
        }
        return out;
    }

    namespace
    {
        std::vector<cplx> symbol_samples(std::span<const cplx> payload, const DmtConfig &cfg)
        {
            std::vector<cplx> s = dmt_symbol(hermitian_load(payload, cfg), cfg);
            const double g = cfg.waveform_scale();
            for (auto &v : s)
                v *= g;
            return s;
        }
    }

    std::vector<cplx> sync_reference(const DmtConfig &cfg, Seed seed)
    {
        return symbol_samples(training_symbols(cfg, seed).front(), cfg);
    }

    DmtFrame build_frame(const BitStream &bits, const DmtConfig &cfg, Seed seed)
    {
        cfg.validate();
        if (bits.size() != cfg.payload_bits())
            throw std::invalid_argument("build_frame: expected " + std::to_string(cfg.payload_bits()) +
                                        " payload bits, got " + std::to_string(bits.size()));
        DmtFrame frame;
        frame.tx_bits = bits;
        frame.tx_symbols = training_symbols(cfg, seed);

        const QamConstellation qam(cfg.qam_order);
        const std::size_t per_symbol = std::size_t(cfg.band_size() * qam.bits_per_symbol());
        for (int d = 0; d < cfg.n_data; ++d)
        {
            std::span<const std::uint8_t> chunk(bits.data() + std::size_t(d) * per_symbol, per_symbol);
            frame.tx_symbols.push_back(qam_map(chunk, qam));
        }

        frame.waveform.sample_rate = cfg.dac_rate;
        frame.waveform.samples.reserve(cfg.frame_length());
        for (const auto &sym : frame.tx_symbols)
        {
            auto s = symbol_samples(sym, cfg);
            frame.waveform.samples.insert(frame.waveform.samples.end(), s.begin(), s.end());
        }
        frame.waveform = clip(frame.waveform, cfg.clip_ratio);
        return frame;
    }

    std::vector<std::vector<cplx>> extract_subcarriers(const ComplexWaveform &w, const DmtConfig &cfg,
                                                       std::size_t frame_start)
    {
        if (frame_start > w.samples.size() || w.samples.size() - frame_start < cfg.frame_length())
            throw std::out_of_range("extract_subcarriers: frame starting at " + std::to_string(frame_start) +
                                    " exceeds waveform of length " + std::to_string(w.samples.size()));
        const std::size_t n = std::size_t(cfg.fft_size);
        const std::size_t sym_len = std::size_t(cfg.symbol_length());
        const double inv_g = 1.0 / cfg.waveform_scale();

        std::vector<std::vector<cplx>> out;
        out.reserve(std::size_t(cfg.n_symbols()));
        std::vector<cplx> buf(n);
        for (int s = 0; s < cfg.n_symbols(); ++s)
        {
            auto first = w.samples.begin() + std::ptrdiff_t(frame_start + std::size_t(s) * sym_len + std::size_t(cfg.cp_len));
            std::copy(first, first + std::ptrdiff_t(n), buf.begin());
            fft_inplace(buf);
            std::vector<cplx> bins(std::size_t(cfg.band_size()));
            for (int k = cfg.k_lo; k <= cfg.k_hi; ++k)
                bins[std::size_t(k - cfg.k_lo)] = buf[std::size_t(k)] * inv_g;
            out.push_back(std::move(bins));
        }
        return out;
    }
}
