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

#include "mgmsim/channel.hpp"
#include "mgmsim/fft.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace mgmsim
{
    namespace
    {
        constexpr std::uint64_t tag_intra = 0x494e545241ULL;
        constexpr std::uint64_t tag_xt = 0x5854ULL;
        constexpr std::uint64_t tag_noise = 0x4e4f495345ULL;
    }

    double ModeGroupField::total_power(std::size_t t) const
    {
        double p = 0.0;
        for (const auto &e : envelopes)
            p += std::norm(e[t]);
        return p;
    }

    void ChannelScenario::validate() const
    {
        if (groups.empty())
            throw std::invalid_argument("scenario needs at least one mode group");
        crosstalk.validate();
        for (int g : groups)
            if (!crosstalk.contains(g))
                throw std::invalid_argument("mode group |l|=" + std::to_string(g) + " is not in crosstalk table '" +
                                            crosstalk.label + "'");
        if (responsivity.size() != groups.size())
            throw std::invalid_argument("responsivity needs one (plus, minus) pair per group");
        for (const auto &r : responsivity)
            if (!(r.plus > 0.0) || !(r.minus > 0.0))
                throw std::invalid_argument("responsivities must be positive");
        if (intra_coupling == IntraCoupling::haar_sections && n_sections < 1)
            throw std::invalid_argument("haar_sections needs n_sections >= 1");
        if (branch_dgd < 0.0 || fiber_loss_db_per_km < 0.0 || length_km < 0.0)
            throw std::invalid_argument("delay, loss and length must be non-negative");
        if (noise.sigma0_sq < 0.0 || noise.kappa < 0.0)
            throw std::invalid_argument("noise variances must be non-negative");
        if (decorrelation_delay < 0)
            throw std::invalid_argument("decorrelation_delay must be non-negative");
        if (rx_bandwidth_hz < 0.0)
            throw std::invalid_argument("rx_bandwidth_hz must be non-negative");
    }

    ModeGroupField launch(const ComplexWaveform &drive, const LaunchConfig &lc, int group_order)
    {
        if (!(lc.alpha > 0.0) || lc.bias < 0.0)
            throw std::invalid_argument("launch: alpha must be positive and bias non-negative");
        ModeGroupField f;
        f.sample_rate = drive.sample_rate;
        f.group_order = group_order;
        for (auto &e : f.envelopes)
            e.assign(drive.size(), cplx{});
        auto &env = f.envelopes[std::size_t(lc.launched_mode)];
        for (std::size_t t = 0; t < drive.size(); ++t)
        {
            double arg = lc.bias + lc.modulation_index * lc.bias * drive.samples[t].real();
            if (arg < 0.0)
                throw std::domain_error("launch: bias too small, V0 + V(t) < 0 at sample " + std::to_string(t));
            env[t] = cplx(std::sqrt(lc.alpha * arg), 0.0);
        }
        return f;
    }

    Unitary4 haar_unitary_4(Seed seed)
    {
        std::mt19937_64 rng(seed.value);
        std::normal_distribution<double> n01(0.0, 1.0);
        Eigen::Matrix4cd z;
        for (int c = 0; c < 4; ++c)
            for (int r = 0; r < 4; ++r)
            {
                double re = n01(rng);
                double im = n01(rng);
                z(r, c) = cplx(re, im);
            }
        Eigen::HouseholderQR<Eigen::Matrix4cd> qr(z);
        Eigen::Matrix4cd q = qr.householderQ();
        Eigen::Matrix4cd r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int i = 0; i < 4; ++i)
        {
            double mag = std::abs(r(i, i));
            cplx ph = mag > 0.0 ? r(i, i) / mag : cplx(1.0, 0.0);
            q.col(i) *= ph;
        }
        return q;
    }

    void apply_unitary(const Unitary4 &u, ModeGroupField &field)
    {
        const std::size_t n = field.size();
        auto &e = field.envelopes;
        for (std::size_t t = 0; t < n; ++t)
        {
            cplx in[4] = {e[0][t], e[1][t], e[2][t], e[3][t]};
            for (int r = 0; r < 4; ++r)
                e[r][t] = u(r, 0) * in[0] + u(r, 1) * in[1] + u(r, 2) * in[2] + u(r, 3) * in[3];
        }
    }

    namespace
    {
        void delay_minus_branch(ModeGroupField &f, double delay_samples)
        {
            if (delay_samples == 0.0)
                return;
            delay_inplace(f.envelopes[2], delay_samples);
            delay_inplace(f.envelopes[3], delay_samples);
        }
    }

    std::vector<ModeGroupField> propagate(std::vector<ModeGroupField> fields, const ChannelScenario &sc, Seed seed)
    {
        sc.validate();
        if (fields.size() != sc.groups.size())
            throw std::invalid_argument("propagate: expected one field per scenario group");
        for (std::size_t i = 0; i < fields.size(); ++i)
        {
            if (fields[i].group_order != sc.groups[i])
                throw std::invalid_argument("propagate: field " + std::to_string(i) + " carries |l|=" +
                                            std::to_string(fields[i].group_order) + ", scenario expects " +
                                            std::to_string(sc.groups[i]));
            for (const auto &e : fields[i].envelopes)
                if (e.size() != fields[0].size())
                    throw std::invalid_argument("propagate: all envelopes must have equal length");
            if (fields[i].sample_rate != fields[0].sample_rate)
                throw std::invalid_argument("propagate: all groups must share one sample rate");
        }

        const double amp = std::pow(10.0, -sc.fiber_loss_db_per_km * sc.length_km / 20.0);
        const double delay_samples = fields.empty() ? 0.0 : sc.branch_dgd * fields[0].sample_rate;
        const int sections = sc.intra_coupling == IntraCoupling::haar_sections ? sc.n_sections : 1;

        for (std::size_t i = 0; i < fields.size(); ++i)
        {
            auto &f = fields[i];
            if (amp != 1.0)
                for (auto &e : f.envelopes)
                    for (auto &v : e)
                        v *= amp;
            if (sc.intra_coupling == IntraCoupling::none)
                continue;
            for (int s = 0; s < sections; ++s)
            {
                apply_unitary(haar_unitary_4(seed.derive({tag_intra, std::uint64_t(f.group_order), std::uint64_t(s)})), f);
                if (s + 1 < sections)
                    delay_minus_branch(f, delay_samples / sections);
            }
        }

        // Leakage uses the fields as they were before any crosstalk was added.
        const std::vector<ModeGroupField> sources = fields;
        for (std::size_t dst = 0; dst < fields.size(); ++dst)
        {
            for (std::size_t src = 0; src < sources.size(); ++src)
            {
                if (src == dst)
                    continue;
                const double xt = sc.crosstalk.at(sc.groups[src], sc.groups[dst]);
                if (std::isinf(xt))
                    continue;
                ModeGroupField leak = sources[src];
                if (sc.decorrelation_delay > 0 && leak.size() > 0)
                    for (auto &e : leak.envelopes)
                        std::rotate(e.rbegin(), e.rbegin() + std::ptrdiff_t(std::size_t(sc.decorrelation_delay) % e.size()), e.rend());
                apply_unitary(haar_unitary_4(seed.derive({tag_xt, std::uint64_t(sc.groups[src]),
                                                          std::uint64_t(sc.groups[dst])})),
                              leak);
                const double scale = std::sqrt(std::pow(10.0, xt / 10.0));
                for (int m = 0; m < 4; ++m)
                    for (std::size_t t = 0; t < leak.size(); ++t)
                        fields[dst].envelopes[m][t] += scale * leak.envelopes[m][t];
            }
        }

        for (auto &f : fields)
            delay_minus_branch(f, delay_samples / sections);
        return fields;
    }

    void gaussian_lowpass_inplace(std::span<cplx> x, double sample_rate, double bandwidth_hz)
    {
        if (bandwidth_hz <= 0.0 || x.empty())
            return;
        const std::size_t n = x.size();
        fft_inplace(x);
        for (std::size_t k = 0; k < n; ++k)
        {
            double kk = (2 * k <= n) ? double(k) : double(n - k);
            double f = kk * sample_rate / double(n);
            // |H|^2 = 1/2 at f = bandwidth_hz
            x[k] *= std::exp(-0.5 * std::log(2.0) * (f / bandwidth_hz) * (f / bandwidth_hz));
        }
        ifft_inplace(x);
    }

    BranchCurrents detect(const std::vector<ModeGroupField> &fields, const ChannelScenario &sc, Seed seed)
    {
        sc.validate();
        if (fields.size() != sc.groups.size())
            throw std::invalid_argument("detect: expected one field per scenario group");

        BranchCurrents out;
        out.groups.resize(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i)
        {
            const auto &f = fields[i];
            const std::size_t n = f.size();
            std::vector<double> p_plus(n), p_minus(n);
            double sum = 0.0;
            for (std::size_t t = 0; t < n; ++t)
            {
                p_plus[t] = std::norm(f.envelopes[0][t]) + std::norm(f.envelopes[1][t]);
                p_minus[t] = std::norm(f.envelopes[2][t]) + std::norm(f.envelopes[3][t]);
                sum += p_plus[t] + p_minus[t];
            }
            double g = 1.0;
            if (sc.rop_dbm && n > 0 && sum > 0.0)
                g = std::pow(10.0, *sc.rop_dbm / 10.0) / (sum / double(n));

            auto make_branch = [&](const std::vector<double> &p, double mu, std::uint64_t branch) {
                ComplexWaveform w;
                w.sample_rate = f.sample_rate;
                w.samples.resize(n);
                double mean_opt = 0.0;
                for (std::size_t t = 0; t < n; ++t)
                {
                    w.samples[t] = cplx(mu * g * p[t], 0.0);
                    mean_opt += g * p[t];
                }
                mean_opt = n ? mean_opt / double(n) : 0.0;
                gaussian_lowpass_inplace(w.samples, w.sample_rate, sc.rx_bandwidth_hz);
                const double var = sc.noise.sigma0_sq + sc.noise.kappa * mean_opt;
                if (var > 0.0)
                {
                    std::mt19937_64 rng(seed.derive({tag_noise, std::uint64_t(f.group_order), branch}).value);
                    std::normal_distribution<double> n01(0.0, 1.0);
                    const double sd = std::sqrt(var);
                    for (auto &s : w.samples)
                        s = cplx(s.real() + sd * n01(rng), 0.0);
                }
                else
                    for (auto &s : w.samples)
                        s = cplx(s.real(), 0.0);
                return w;
            };
            out.groups[i].plus = make_branch(p_plus, sc.responsivity[i].plus, 0);
            out.groups[i].minus = make_branch(p_minus, sc.responsivity[i].minus, 1);
        }
        return out;
    }
}
