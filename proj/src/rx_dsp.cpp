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

#include "mgmsim/rx_dsp.hpp"
#include "mgmsim/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace mgmsim
{
    std::string to_string(CombinerMode m)
    {
        switch (m)
        {
        case CombinerMode::single_plus:
            return "single_plus";
        case CombinerMode::single_minus:
            return "single_minus";
        case CombinerMode::erc:
            return "erc";
        case CombinerMode::mrc:
            return "mrc";
        }
        return "?";
    }

    CombinerMode parse_combiner(const std::string &name)
    {
        for (auto m : {CombinerMode::single_plus, CombinerMode::single_minus, CombinerMode::erc, CombinerMode::mrc})
            if (to_string(m) == name)
                return m;
        throw std::invalid_argument("unknown combiner '" + name + "' (expected single_plus, single_minus, erc or mrc)");
    }

    namespace
    {
        std::vector<double> kaiser_sinc(int p, int q)
        {
            const int taps_per_phase = 64;
            const int m = std::max(p, q);
            const int len = taps_per_phase * m + 1;
            const double fc = 0.5 / double(m); // cycles per upsampled sample
            const double beta = 10.0;
            const double c = 0.5 * double(len - 1);
            const double i0b = std::cyl_bessel_i(0.0, beta);
            std::vector<double> h(static_cast<std::size_t>(len));
            for (int k = 0; k < len; ++k)
            {
                double x = double(k) - c;
                double sinc = x == 0.0 ? 1.0 : std::sin(2.0 * std::numbers::pi * fc * x) / (std::numbers::pi * x * 2.0 * fc);
                double r = x / c;
                double win = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0b;
                h[std::size_t(k)] = 2.0 * fc * sinc * win;
            }
            // Unit DC gain on every polyphase branch.
            for (int ph = 0; ph < p; ++ph)
            {
                double s = 0.0;
                for (int k = ph; k < len; k += p)
                    s += h[std::size_t(k)];
                for (int k = ph; k < len; k += p)
                    h[std::size_t(k)] *= 1.0 / s;
            }
            return h;
        }
    }

    ComplexWaveform resample_rational(const ComplexWaveform &w, int p, int q)
    {
        if (p < 1 || q < 1)
            throw std::invalid_argument("resample_rational: p and q must be positive");
        if (std::gcd(p, q) != 1)
            throw std::invalid_argument("resample_rational: p and q must be coprime");
        ComplexWaveform out;
        out.sample_rate = w.sample_rate * double(p) / double(q);
        if (p == 1 && q == 1)
        {
            out.samples = w.samples;
            return out;
        }

        const std::vector<double> h = kaiser_sinc(p, q);
        const long len = long(h.size());
        const long c = (len - 1) / 2;
        const long n_in = long(w.samples.size());
        const long n_out = (n_in * p + q - 1) / q;
        out.samples.assign(std::size_t(n_out), cplx{});
        for (long m = 0; m < n_out; ++m)
        {
            // taps h[c + m q - n p] with index in [0, len)
            const long pos = m * long(q) + c;
            long n_lo = pos - (len - 1) <= 0 ? 0 : (pos - (len - 1) + p - 1) / p;
            long n_hi = std::min(n_in - 1, pos / p);
            cplx acc{};
            for (long n = n_lo; n <= n_hi; ++n)
                acc += h[std::size_t(pos - n * p)] * w.samples[std::size_t(n)];
            out.samples[std::size_t(m)] = acc;
        }
        return out;
    }

    SyncResult synchronize(const ComplexWaveform &w, std::span<const cplx> sync_ref)
    {
        const std::size_t len = w.samples.size();
        const std::size_t m = sync_ref.size();
        if (m == 0 || len < m)
            throw SyncLost("synchronize: waveform shorter than the sync reference");

        double ref_energy = 0.0;
        for (const auto &v : sync_ref)
            ref_energy += std::norm(v);
        if (ref_energy <= 0.0)
            throw SyncLost("synchronize: sync reference has no energy");

        const std::size_t nfft = fast_fft_size(len + m);
        std::vector<cplx> a(nfft, cplx{}), b(nfft, cplx{});
        std::copy(w.samples.begin(), w.samples.end(), a.begin());
        std::copy(sync_ref.begin(), sync_ref.end(), b.begin());
        fft_inplace(a);
        fft_inplace(b);
        for (std::size_t k = 0; k < nfft; ++k)
            a[k] *= std::conj(b[k]);
        ifft_inplace(a);
        const double unscale = std::sqrt(double(nfft));

        std::vector<double> prefix(len + 1, 0.0);
        for (std::size_t i = 0; i < len; ++i)
            prefix[i + 1] = prefix[i] + std::norm(w.samples[i]);

        SyncResult best{0, -1.0};
        const double ref_norm = std::sqrt(ref_energy);
        for (std::size_t t = 0; t + m <= len; ++t)
        {
            double e = prefix[t + m] - prefix[t];
            if (e <= 0.0)
                continue;
            double v = std::abs(a[t]) * unscale / (std::sqrt(e) * ref_norm);
            if (v > best.peak)
                best = {t, v};
        }
        if (best.peak < sync_threshold)
            throw SyncLost("synchronize: no correlation peak above " + std::to_string(sync_threshold) +
                           " (max " + std::to_string(std::max(best.peak, 0.0)) + ")");
        return best;
    }

    ChannelEstimate estimate_channel(const SymbolBlock &train_rx, const SymbolBlock &train_tx)
    {
        if (train_rx.size() < 2 || train_tx.size() != train_rx.size())
            throw std::invalid_argument("estimate_channel: need at least 2 training symbols on both sides");
        const std::size_t t_count = train_rx.size();
        const std::size_t n_sc = train_rx[0].size();
        for (std::size_t t = 0; t < t_count; ++t)
            if (train_rx[t].size() != n_sc || train_tx[t].size() != n_sc)
                throw std::invalid_argument("estimate_channel: inconsistent subcarrier counts");

        ChannelEstimate est;
        est.h.assign(n_sc, cplx{});
        est.snr.assign(n_sc, snr_floor);
        for (std::size_t k = 0; k < n_sc; ++k)
        {
            cplx h{};
            double px = 0.0;
            for (std::size_t t = 0; t < t_count; ++t)
            {
                const cplx x = train_tx[t][k];
                const double ex = std::norm(x);
                if (ex == 0.0)
                    throw std::invalid_argument("estimate_channel: zero pilot");
                h += train_rx[t][k] * std::conj(x) / ex;
                px += ex;
            }
            h /= double(t_count);
            px /= double(t_count);

            double var = 0.0;
            for (std::size_t t = 0; t < t_count; ++t)
                var += std::norm(train_rx[t][k] - h * train_tx[t][k]);
            var /= double(t_count - 1);

            double snr = var > 0.0 ? std::norm(h) * px / var : snr_cap;
            if (std::norm(h) == 0.0)
                snr = snr_floor;
            est.h[k] = h;
            est.snr[k] = std::clamp(snr, snr_floor, snr_cap);
        }
        return est;
    }

    SymbolBlock equalize(const SymbolBlock &rx, const ChannelEstimate &est)
    {
        SymbolBlock out = rx;
        for (auto &sym : out)
        {
            if (sym.size() != est.h.size())
                throw std::invalid_argument("equalize: channel estimate does not cover the payload band");
            for (std::size_t k = 0; k < sym.size(); ++k)
                sym[k] = est.h[k] == cplx{} ? cplx{} : sym[k] / est.h[k];
        }
        return out;
    }

    SymbolBlock combine(const SymbolBlock &y_plus, const SymbolBlock &y_minus, const ChannelEstimate &est_plus,
                        const ChannelEstimate &est_minus, CombinerMode mode)
    {
        if (y_plus.size() != y_minus.size())
            throw std::invalid_argument("combine: branches carry different symbol counts");
        const std::size_t n_sc = est_plus.snr.size();
        if (est_minus.snr.size() != n_sc)
            throw std::invalid_argument("combine: estimates cover different bands");
        for (std::size_t s = 0; s < y_plus.size(); ++s)
            if (y_plus[s].size() != n_sc || y_minus[s].size() != n_sc)
                throw std::invalid_argument("combine: symbol " + std::to_string(s) + " is not subcarrier aligned");

        if (mode == CombinerMode::single_plus)
            return y_plus;
        if (mode == CombinerMode::single_minus)
            return y_minus;

        SymbolBlock z = y_plus;
        for (std::size_t s = 0; s < z.size(); ++s)
            for (std::size_t k = 0; k < n_sc; ++k)
            {
                if (mode == CombinerMode::erc)
                {
                    z[s][k] = 0.5 * (y_plus[s][k] + y_minus[s][k]);
                    continue;
                }
                const double wp = est_plus.snr[k], wm = est_minus.snr[k];
                z[s][k] = (y_plus[s][k] * wp + y_minus[s][k] * wm) / (wp + wm);
            }
        return z;
    }

    BranchRx receive_branch(const ComplexWaveform &w, const DmtConfig &cfg, std::span<const cplx> sync_ref,
                            const SymbolBlock &pilots, const BranchRxOptions &opt)
    {
        if (pilots.size() != std::size_t(cfg.n_sync + cfg.n_train))
            throw std::invalid_argument("receive_branch: pilot count does not match n_sync + n_train");

        // Strip the bias and bring the branch to unit RMS.
        ComplexWaveform x = w;
        if (!x.samples.empty())
        {
            cplx mean = std::accumulate(x.samples.begin(), x.samples.end(), cplx{}) / double(x.samples.size());
            for (auto &v : x.samples)
                v -= mean;
            double p = mean_power(x);
            if (p > 0.0)
                for (auto &v : x.samples)
                    v /= std::sqrt(p);
        }

        BranchRx r;
        std::size_t start = 0;
        try
        {
            start = synchronize(x, sync_ref).start;
            r.synced = true;
        }
        catch (const SyncLost &)
        {
            if (!opt.fallback_start)
                throw;
            start = *opt.fallback_start;
        }
        const std::size_t backoff = std::size_t(opt.sync_backoff < 0 ? cfg.cp_len / 2 : opt.sync_backoff);
        r.frame_start = start >= backoff ? start - backoff : 0;
        if (x.samples.size() - std::min(x.samples.size(), r.frame_start) < cfg.frame_length())
            r.frame_start = x.samples.size() >= cfg.frame_length() ? x.samples.size() - cfg.frame_length() : 0;

        SymbolBlock all = extract_subcarriers(x, cfg, r.frame_start);
        const std::size_t n_pilot = std::size_t(cfg.n_sync + cfg.n_train);
        SymbolBlock train_rx(all.begin() + cfg.n_sync, all.begin() + std::ptrdiff_t(n_pilot));
        SymbolBlock train_tx(pilots.begin() + cfg.n_sync, pilots.end());
        r.est = estimate_channel(train_rx, train_tx);
        r.data = equalize(SymbolBlock(all.begin() + std::ptrdiff_t(n_pilot), all.end()), r.est);
        return r;
    }
}
