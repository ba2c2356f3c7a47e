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
#include "mgmsim/rx_dsp.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace mgmsim;

namespace
{
    struct Branches
    {
        SymbolBlock tx, y_plus, y_minus, train_tx, train_plus, train_minus;
    };

    // One subcarrier per symbol: y = h x + n with E|n|^2 = |h|^2 / snr.
    Branches awgn_branches(double snr_plus_db, double snr_minus_db, std::size_t n_data, std::size_t n_train,
                           std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g;
        QamConstellation qpsk(4);
        const cplx hp(0.8, 0.3), hm(-0.2, 0.5);
        const double sp = std::abs(hp) / std::sqrt(2.0 * db_to_lin(snr_plus_db));
        const double sm = std::abs(hm) / std::sqrt(2.0 * db_to_lin(snr_minus_db));
        Branches b;
        auto fill = [&](std::size_t n, SymbolBlock &x, SymbolBlock &yp, SymbolBlock &ym) {
            for (std::size_t i = 0; i < n; ++i)
            {
                cplx s = qpsk.point(unsigned(rng() & 3));
                x.push_back({s});
                yp.push_back({hp * s + sp * cplx(g(rng), g(rng))});
                ym.push_back({hm * s + sm * cplx(g(rng), g(rng))});
            }
        };
        fill(n_train, b.train_tx, b.train_plus, b.train_minus);
        fill(n_data, b.tx, b.y_plus, b.y_minus);
        return b;
    }

    double measured_snr(const SymbolBlock &z, const SymbolBlock &x)
    {
        double e = 0;
        for (std::size_t i = 0; i < z.size(); ++i)
            e += std::norm(z[i][0] - x[i][0]);
        return double(z.size()) / e;
    }

    std::vector<cplx> random_real(std::size_t n, std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g;
        std::vector<cplx> v(n);
        for (auto &z : v)
            z = cplx(g(rng), 0.0);
        return v;
    }
}

TEST_CASE("combiner names")
{
    for (auto m : {CombinerMode::single_plus, CombinerMode::single_minus, CombinerMode::erc, CombinerMode::mrc})
        CHECK(parse_combiner(to_string(m)) == m);
    CHECK_THROWS_AS(parse_combiner("sc"), std::invalid_argument);
}

TEST_CASE("channel estimate recovers a known gain and SNR")
{
    auto b = awgn_branches(12.0, 12.0, 1, 4000, 2);
    auto est = estimate_channel(b.train_plus, b.train_tx);
    CHECK(std::abs(est.h[0] - cplx(0.8, 0.3)) < 0.02);
    CHECK(lin_to_db(est.snr[0]) == doctest::Approx(12.0).epsilon(0.02));

    SymbolBlock one{{cplx(1, 0)}};
    CHECK_THROWS_AS(estimate_channel(one, one), std::invalid_argument);

    // noiseless: capped SNR, exact inversion
    SymbolBlock tx{{cplx(1, 1)}, {cplx(-1, 1)}}, rx{{cplx(2, 2)}, {cplx(-2, 2)}};
    auto e = estimate_channel(rx, tx);
    CHECK(e.snr[0] == snr_cap);
    CHECK(std::abs(equalize(rx, e)[1][0] - cplx(-1, 1)) < 1e-15);
}

TEST_CASE("mrc adds branch SNRs, erc averages equalized symbols")
{
    const std::pair<double, double> cases[] = {{10, 10}, {20, 5}, {15, 0}};
    for (auto [g1, g2] : cases)
    {
        auto b = awgn_branches(g1, g2, 100000, 400, std::uint64_t(g1 * 100 + g2));
        auto ep = estimate_channel(b.train_plus, b.train_tx);
        auto em = estimate_channel(b.train_minus, b.train_tx);
        auto yp = equalize(b.y_plus, ep), ym = equalize(b.y_minus, em);
        auto z = combine(yp, ym, ep, em, CombinerMode::mrc);
        const double expect = db_to_lin(g1) + db_to_lin(g2);
        CHECK(std::abs(lin_to_db(measured_snr(z, b.tx)) - lin_to_db(expect)) < 0.5);

        // equal weights on equalized symbols: noise variances average with weight 1/4
        auto ze = combine(yp, ym, ep, em, CombinerMode::erc);
        const double erc_expect = 4.0 / (1.0 / db_to_lin(g1) + 1.0 / db_to_lin(g2));
        CHECK(std::abs(lin_to_db(measured_snr(ze, b.tx)) - lin_to_db(erc_expect)) < 0.5);
        CHECK(measured_snr(z, b.tx) >= measured_snr(ze, b.tx) * 0.98);

        CHECK(combine(yp, ym, ep, em, CombinerMode::single_plus) == yp);
        CHECK(combine(yp, ym, ep, em, CombinerMode::single_minus) == ym);
    }
}

TEST_CASE("combine rejects misaligned branches")
{
    SymbolBlock a{{cplx(1, 0)}}, b{{cplx(1, 0)}, {cplx(1, 0)}};
    ChannelEstimate e{{cplx(1, 0)}, {1.0}};
    CHECK_THROWS_AS(combine(a, b, e, e, CombinerMode::mrc), std::invalid_argument);
}

TEST_CASE("synchronization finds offset 777 at 0 dB SNR")
{
    DmtConfig c;
    const auto ref = sync_reference(c, Seed{3});
    std::mt19937_64 rng(77);
    std::normal_distribution<double> g;
    int hits = 0;
    const int trials = 200;
    for (int i = 0; i < trials; ++i)
    {
        ComplexWaveform w;
        w.samples.assign(6000, cplx{});
        for (std::size_t t = 0; t < ref.size(); ++t)
            w.samples[777 + t] = ref[t];
        const double rms = std::sqrt(mean_power(std::span<const cplx>(ref)));
        for (auto &s : w.samples)
            s += cplx(rms * g(rng), 0.0);
        try
        {
            hits += synchronize(w, ref).start == 777;
        }
        catch (const SyncLost &)
        {
        }
    }
    CHECK(double(hits) / trials > 0.99);

    ComplexWaveform noise;
    noise.samples = random_real(6000, 5);
    CHECK_THROWS_AS(synchronize(noise, ref), SyncLost);
}

TEST_CASE("rational resampler")
{
    ComplexWaveform w;
    w.sample_rate = 10.0;
    w.samples = random_real(100, 1);
    auto same = resample_rational(w, 1, 1);
    CHECK(same.samples == w.samples);
    CHECK_THROWS_AS(resample_rational(w, 2, 4), std::invalid_argument);
    CHECK_THROWS_AS(resample_rational(w, 0, 1), std::invalid_argument);

    // slow tone survives up and back down
    const std::size_t n = 3000;
    w.samples.resize(n);
    for (std::size_t t = 0; t < n; ++t)
        w.samples[t] = std::cos(2 * std::numbers::pi * 0.03 * double(t));
    auto up = resample_rational(w, 5, 3);
    CHECK(up.sample_rate == doctest::Approx(50.0 / 3.0));
    CHECK(up.size() == 5000);
    for (std::size_t m = 400; m < 4600; m += 37)
        CHECK(std::abs(up.samples[m].real() - std::cos(2 * std::numbers::pi * 0.03 * double(m) * 3.0 / 5.0)) < 1e-4);
    auto back = resample_rational(up, 3, 5);
    for (std::size_t t = 300; t < 2700; ++t)
        CHECK(std::abs(back.samples[t] - w.samples[t]) < 1e-4);
}

TEST_CASE("receive chain on a delayed, dispersive, noiseless link")
{
    DmtConfig c;
    c.clip_ratio = no_clipping;
    const Seed pilot_seed{21};
    auto frame = build_frame(random_bits(c.payload_bits(), Seed{4}), c, pilot_seed);
    SymbolBlock pilots(frame.tx_symbols.begin(), frame.tx_symbols.begin() + c.n_sync + c.n_train);
    const std::vector<double> taps{1.0, 0.3, -0.2, 0.05};
    const std::size_t offset = 1234;
    ComplexWaveform w;
    w.samples.assign(offset + frame.waveform.size() + 500, cplx{});
    for (std::size_t t = 0; t < frame.waveform.size(); ++t)
        for (std::size_t k = 0; k < taps.size(); ++k)
            w.samples[offset + t + k] += taps[k] * frame.waveform.samples[t];
    for (auto &s : w.samples)
        s = s * 3.0 + 7.0; // gain and bias are stripped by the receiver

    auto rx = receive_branch(w, c, sync_reference(c, pilot_seed), pilots);
    CHECK(rx.synced);
    CHECK(rx.frame_start == offset - std::size_t(c.cp_len / 2));
    const QamConstellation qpsk(4);
    double worst = 0;
    for (std::size_t s = 0; s < rx.data.size(); ++s)
        for (std::size_t k = 0; k < rx.data[s].size(); ++k)
            worst = std::max(worst, std::abs(rx.data[s][k] - frame.tx_symbols[std::size_t(c.n_sync + c.n_train) + s][k]));
    CHECK(worst < 1e-6);

    ComplexWaveform silent;
    silent.samples.assign(w.size(), cplx{});
    CHECK_THROWS_AS(receive_branch(silent, c, sync_reference(c, pilot_seed), pilots), SyncLost);
    BranchRxOptions opt;
    opt.fallback_start = offset;
    auto fb = receive_branch(silent, c, sync_reference(c, pilot_seed), pilots, opt);
    CHECK(!fb.synced);
}
