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

#include "mgmsim/harness.hpp"
#include "mgmsim/fft.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <optional>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mgmsim
{
    namespace
    {
        constexpr std::uint64_t tag_bits = 0x42495453ULL;
        constexpr std::uint64_t tag_pilot = 0x50494c4f54ULL;
        constexpr std::uint64_t tag_offset = 0x4f4646ULL;
        constexpr std::uint64_t tag_channel = 0x4348414eULL;
        constexpr std::uint64_t tag_noise = 0x4e4f4953ULL;
        constexpr std::size_t max_offset = 64;
    }

    // ---------------------------------------------------------------- spec

    void SweepSpec::validate() const
    {
        scenario.validate();
        dmt.validate();
        if (qam_order.size() != scenario.groups.size())
            throw std::invalid_argument("channel.qam_order: need one entry per group");
        for (int q : qam_order)
            if (q != 4 && q != 16)
                throw std::invalid_argument("channel.qam_order: entries must be 4 or 16");
        if (rop_grid_dbm.empty())
            throw std::invalid_argument("rop_grid_dbm: must not be empty");
        for (std::size_t i = 1; i < rop_grid_dbm.size(); ++i)
            if (!(rop_grid_dbm[i] > rop_grid_dbm[i - 1]))
                throw std::invalid_argument("rop_grid_dbm: must be strictly increasing");
        if (combiners.empty())
            throw std::invalid_argument("combiners: must not be empty");
        if (frames_per_point < 1)
            throw std::invalid_argument("frames_per_point: must be >= 1");
        if (guard_samples < 0)
            throw std::invalid_argument("guard_samples: must be non-negative");
        if (constellation_cap < 0)
            throw std::invalid_argument("constellation_cap: must be non-negative");
        if (adc_rate < 0.0)
            throw std::invalid_argument("adc_rate_hz: must be non-negative");
        if (adc_rate > 0.0)
        {
            auto a = std::llround(adc_rate), d = std::llround(dmt.dac_rate);
            auto g = std::gcd(a, d);
            if (double(a) != adc_rate || double(d) != dmt.dac_rate || a / g > 64 || d / g > 64)
                throw std::invalid_argument("adc_rate_hz: ratio to dmt.dac_rate_hz must reduce to p/q with p, q <= 64");
        }
        if (!(launch.alpha > 0.0) || !(launch.bias > 0.0) || !(launch.modulation_index > 0.0) ||
            launch.modulation_index > 1.0)
            throw std::invalid_argument("launch: need alpha > 0, bias > 0 and modulation_index in (0, 1]");
        if (calibration.mg != 0 &&
            std::find(scenario.groups.begin(), scenario.groups.end(), calibration.mg) == scenario.groups.end())
            throw std::invalid_argument("calibration.mg: not an active group");
        if (!(calibration.ber > 0.0 && calibration.ber < 0.5))
            throw std::invalid_argument("calibration.ber: must lie in (0, 0.5)");
        if (!(calibration.kappa_lo > 0.0 && calibration.kappa_hi > calibration.kappa_lo))
            throw std::invalid_argument("calibration: need 0 < kappa_lo < kappa_hi");
        if (calibration.frames < 1)
            throw std::invalid_argument("calibration.frames: must be >= 1");
    }

    std::vector<std::string> scenario_names() { return {"table1_3mg", "table2_2mg"}; }

    SweepSpec named_scenario(const std::string &name)
    {
        SweepSpec s;
        s.scenario_name = name;
        s.launch = LaunchConfig{1.0, 0.25, 1.0, Mode::plus_l_plus_s};
        s.combiners = {CombinerMode::mrc, CombinerMode::erc, CombinerMode::single_plus, CombinerMode::single_minus};

        auto &sc = s.scenario;
        sc.intra_coupling = IntraCoupling::haar_per_frame;
        sc.fiber_loss_db_per_km = 0.75;
        sc.decorrelation_delay = 1000;
        sc.noise = NoiseModel{0.0, 0.0};
        if (name == "table1_3mg")
        {
            sc.groups = {2, 3, 4};
            sc.crosstalk = table_1km();
            sc.length_km = 1.0;
            sc.responsivity = {{1.0, 0.5}, {0.8, 1.0}, {1.0, 0.7}};
            s.qam_order = {4, 16, 16};
            sc.noise.kappa = 2.2e-3;
            s.calibration.mg = 4;
            for (int r = -14; r <= 12; ++r)
                s.rop_grid_dbm.push_back(double(r));
        }
        else if (name == "table2_2mg")
        {
            sc.groups = {3, 4};
            sc.crosstalk = table_18km();
            sc.length_km = 18.4;
            sc.responsivity = {{1.0, 0.6}, {0.9, 1.0}};
            s.qam_order = {4, 4};
            sc.noise.kappa = 1.0e-2;
            s.calibration.mg = 3;
            for (int r = -10; r <= 12; ++r)
                s.rop_grid_dbm.push_back(double(r));
        }
        else
            throw std::invalid_argument("unknown scenario '" + name + "' (expected table1_3mg or table2_2mg)");
        sc.branch_dgd = 5e-12 * sc.length_km; // 5 ps/km
        return s;
    }

    // --------------------------------------------------------------- stats

    namespace
    {
        PointStats empty_point(int mg, CombinerMode c, double rop, std::size_t band)
        {
            PointStats p;
            p.mg = mg;
            p.combiner = c;
            p.rop_dbm = rop;
            p.signal_power.assign(band, 0.0);
            p.error_power.assign(band, 0.0);
            p.sc_errors.assign(band, 0);
            p.sc_bits.assign(band, 0);
            return p;
        }
    }

    void PointStats::merge(const PointStats &o, std::size_t constellation_cap)
    {
        if (o.mg != mg || o.combiner != combiner || o.rop_dbm != rop_dbm || o.signal_power.size() != signal_power.size())
            throw std::invalid_argument("PointStats::merge: points do not describe the same sweep point");
        errors += o.errors;
        bits += o.bits;
        frames += o.frames;
        frames_lost += o.frames_lost;
        for (std::size_t k = 0; k < signal_power.size(); ++k)
        {
            signal_power[k] += o.signal_power[k];
            error_power[k] += o.error_power[k];
            sc_errors[k] += o.sc_errors[k];
            sc_bits[k] += o.sc_bits[k];
        }
        for (std::size_t i = 0; i < o.constellation.size() && constellation.size() < constellation_cap; ++i)
            constellation.push_back(o.constellation[i]);
    }

    double PointStats::mean_snr_db() const
    {
        double s = std::accumulate(signal_power.begin(), signal_power.end(), 0.0);
        double e = std::accumulate(error_power.begin(), error_power.end(), 0.0);
        return 10.0 * std::log10(s / e);
    }

    LinkReport PointStats::report() const
    {
        LinkReport r;
        r.mg = mg;
        r.combiner = combiner;
        r.rop_dbm = rop_dbm;
        r.errors = errors;
        r.bit_count = bits;
        double s = std::accumulate(signal_power.begin(), signal_power.end(), 0.0);
        double e = std::accumulate(error_power.begin(), error_power.end(), 0.0);
        r.evm_rms = s > 0.0 ? std::sqrt(e / s) : 0.0;
        r.per_subcarrier.resize(signal_power.size());
        for (std::size_t k = 0; k < signal_power.size(); ++k)
            r.per_subcarrier[k] = {10.0 * std::log10(signal_power[k] / error_power[k]),
                                   sc_bits[k] ? double(sc_errors[k]) / double(sc_bits[k]) : 0.0};
        return r;
    }

    const PointStats &SweepReport::at(int mg, CombinerMode c, std::size_t rop_index) const
    {
        std::size_t seen = 0;
        for (const auto &p : points)
            if (p.mg == mg && p.combiner == c && seen++ == rop_index)
                return p;
        throw std::out_of_range("SweepReport::at: no such point");
    }

    std::vector<CurvePoint> SweepReport::curve(int mg, CombinerMode c) const
    {
        std::vector<CurvePoint> out;
        for (const auto &p : points)
            if (p.mg == mg && p.combiner == c)
                out.push_back({p.rop_dbm, p.bits ? double(p.errors) / double(p.bits) : 0.0});
        return out;
    }

    void SweepReport::merge(const SweepReport &other, std::size_t constellation_cap)
    {
        if (points.empty())
        {
            points = other.points;
            return;
        }
        if (other.points.size() != points.size())
            throw std::invalid_argument("SweepReport::merge: reports cover different sweeps");
        for (std::size_t i = 0; i < points.size(); ++i)
            points[i].merge(other.points[i], constellation_cap);
    }

    // ---------------------------------------------------------- simulation

    namespace
    {
        struct GroupTx
        {
            DmtConfig cfg;
            DmtFrame frame;
            std::vector<cplx> sync_ref;
            SymbolBlock pilots;
            std::vector<unsigned> labels; // tx labels of the data symbols, [symbol * band + k]
        };

        std::pair<int, int> adc_ratio(const SweepSpec &spec)
        {
            auto a = std::llround(spec.adc_rate), d = std::llround(spec.dmt.dac_rate);
            auto g = std::gcd(a, d);
            return {int(a / g), int(d / g)};
        }

        /// Simulates one frame index for every group, ROP point and combiner.
        /// Output layout: [group][combiner][rop].
        std::vector<PointStats> simulate_frame(const SweepSpec &spec, std::size_t frame)
        {
            const auto &sc = spec.scenario;
            const std::size_t n_groups = sc.groups.size();
            const std::size_t band = std::size_t(spec.dmt.band_size());
            const std::uint64_t f = frame;

            std::vector<GroupTx> tx(n_groups);
            const std::size_t offset = spec.seed.derive({tag_offset, f}).value % max_offset;
            const std::size_t guard = std::size_t(spec.guard_samples);
            const std::size_t stream_len = fast_fft_size(2 * guard + max_offset + spec.dmt.frame_length());
            const std::size_t frame_pos = guard + offset;

            std::vector<ModeGroupField> fields;
            for (std::size_t g = 0; g < n_groups; ++g)
            {
                const auto mg = std::uint64_t(sc.groups[g]);
                auto &t = tx[g];
                t.cfg = spec.dmt;
                t.cfg.qam_order = spec.qam_order[g];
                const Seed pilot_seed = spec.seed.derive({tag_pilot, mg});
                t.frame = build_frame(random_bits(t.cfg.payload_bits(), spec.seed.derive({tag_bits, mg, f})), t.cfg,
                                      pilot_seed);
                t.sync_ref = sync_reference(t.cfg, pilot_seed);
                t.pilots = SymbolBlock(t.frame.tx_symbols.begin(), t.frame.tx_symbols.begin() + t.cfg.n_sync + t.cfg.n_train);

                const QamConstellation qam(t.cfg.qam_order);
                const std::size_t first_data = std::size_t(t.cfg.n_sync + t.cfg.n_train);
                for (std::size_t s = first_data; s < t.frame.tx_symbols.size(); ++s)
                    for (const auto &x : t.frame.tx_symbols[s])
                        t.labels.push_back(qam.decide(x));

                ComplexWaveform drive;
                drive.sample_rate = spec.dmt.dac_rate;
                drive.samples.assign(stream_len, cplx{});
                std::copy(t.frame.waveform.samples.begin(), t.frame.waveform.samples.end(),
                          drive.samples.begin() + std::ptrdiff_t(frame_pos));
                fields.push_back(launch(drive, spec.launch, sc.groups[g]));
            }
            fields = propagate(std::move(fields), sc, spec.seed.derive({tag_channel, f}));

            const std::size_t n_comb = spec.combiners.size();
            const std::size_t n_rop = spec.rop_grid_dbm.size();
            std::vector<PointStats> out;
            out.reserve(n_groups * n_comb * n_rop);
            for (std::size_t g = 0; g < n_groups; ++g)
                for (auto c : spec.combiners)
                    for (double rop : spec.rop_grid_dbm)
                        out.push_back(empty_point(sc.groups[g], c, rop, band));

            ChannelScenario point_sc = sc;
            for (std::size_t r = 0; r < n_rop; ++r)
            {
                point_sc.rop_dbm = spec.rop_grid_dbm[r];
                BranchCurrents cur = detect(fields, point_sc, spec.seed.derive({tag_noise, std::uint64_t(r), f}));
                for (std::size_t g = 0; g < n_groups; ++g)
                {
                    const auto &t = tx[g];
                    const QamConstellation qam(t.cfg.qam_order);
                    const int bps = qam.bits_per_symbol();
                    ComplexWaveform plus = std::move(cur.groups[g].plus);
                    ComplexWaveform minus = std::move(cur.groups[g].minus);
                    if (spec.adc_rate > 0.0)
                    {
                        auto [p, q] = adc_ratio(spec);
                        for (auto *w : {&plus, &minus})
                        {
                            *w = resample_rational(resample_rational(*w, p, q), q, p);
                            w->samples.resize(stream_len);
                        }
                    }

                    std::optional<BranchRx> rp, rm;
                    auto attempt = [&](const ComplexWaveform &w, std::optional<std::size_t> fallback) -> std::optional<BranchRx> {
                        BranchRxOptions opt;
                        opt.fallback_start = fallback;
                        try
                        {
                            return receive_branch(w, t.cfg, t.sync_ref, t.pilots, opt);
                        }
                        catch (const SyncLost &)
                        {
                            return std::nullopt;
                        }
                    };
                    rp = attempt(plus, std::nullopt);
                    rm = attempt(minus, rp ? std::optional(rp->frame_start + std::size_t(t.cfg.cp_len / 2)) : std::nullopt);
                    if (!rp && rm)
                        rp = attempt(plus, rm->frame_start + std::size_t(t.cfg.cp_len / 2));

                    for (std::size_t ci = 0; ci < n_comb; ++ci)
                    {
                        PointStats &ps = out[(g * n_comb + ci) * n_rop + r];
                        ps.frames += 1;
                        const CombinerMode mode = spec.combiners[ci];
                        const bool usable = mode == CombinerMode::single_plus    ? bool(rp)
                                            : mode == CombinerMode::single_minus ? bool(rm)
                                                                                 : rp && rm;
                        if (!usable)
                        {
                            // Loss of frame: every payload bit counts as a coin flip.
                            ps.frames_lost += 1;
                            for (std::size_t k = 0; k < band; ++k)
                            {
                                std::size_t b = std::size_t(t.cfg.n_data * bps);
                                ps.sc_bits[k] += b;
                                ps.sc_errors[k] += b / 2;
                                ps.bits += b;
                                ps.errors += b / 2;
                            }
                            continue;
                        }
                        SymbolBlock z = mode == CombinerMode::single_plus    ? rp->data
                                        : mode == CombinerMode::single_minus ? rm->data
                                                                             : combine(rp->data, rm->data, rp->est, rm->est, mode);
                        const std::size_t first_data = std::size_t(t.cfg.n_sync + t.cfg.n_train);
                        for (std::size_t s = 0; s < z.size(); ++s)
                        {
                            const auto &ref = t.frame.tx_symbols[first_data + s];
                            for (std::size_t k = 0; k < band; ++k)
                            {
                                unsigned rx_label = qam.decide(z[s][k]);
                                std::size_t e = std::size_t(std::popcount(rx_label ^ t.labels[s * band + k]));
                                ps.sc_errors[k] += e;
                                ps.sc_bits[k] += std::size_t(bps);
                                ps.errors += e;
                                ps.bits += std::size_t(bps);
                                ps.signal_power[k] += std::norm(ref[k]);
                                ps.error_power[k] += std::norm(z[s][k] - ref[k]);
                                if (spec.dump_constellations && ps.constellation.size() < std::size_t(spec.constellation_cap))
                                    ps.constellation.push_back(z[s][k]);
                            }
                        }
                    }
                }
            }
            return out;
        }

        template <class Fn>
        void parallel_for(std::size_t count, int jobs, Fn &&fn)
        {
            if (jobs <= 1 || count <= 1)
            {
                for (std::size_t i = 0; i < count; ++i)
                    fn(i);
                return;
            }
            std::atomic<std::size_t> next{0};
            std::exception_ptr failure;
            std::mutex failure_mutex;
            std::vector<std::thread> workers;
            const std::size_t n_workers = std::min<std::size_t>(std::size_t(jobs), count);
            for (std::size_t w = 0; w < n_workers; ++w)
                workers.emplace_back([&] {
                    for (std::size_t i = next++; i < count; i = next++)
                    {
                        try
                        {
                            fn(i);
                        }
                        catch (...)
                        {
                            std::lock_guard<std::mutex> lock(failure_mutex);
                            if (!failure)
                                failure = std::current_exception();
                        }
                    }
                });
            for (auto &w : workers)
                w.join();
            if (failure)
                std::rethrow_exception(failure);
        }
    }

    SweepReport run_sweep(const SweepSpec &spec, int jobs)
    {
        spec.validate();
        const std::size_t frames = std::size_t(spec.frames_per_point);
        const std::size_t batch = std::size_t(std::max(1, jobs)) * 2;
        const std::size_t cap = std::size_t(spec.constellation_cap);

        SweepReport total;
        for (std::size_t first = 0; first < frames; first += batch)
        {
            const std::size_t count = std::min(batch, frames - first);
            std::vector<std::vector<PointStats>> results(count);
            parallel_for(count, jobs, [&](std::size_t i) { results[i] = simulate_frame(spec, first + i); });
            // Frame-ordered reduction keeps floating-point sums independent of `jobs`.
            for (auto &res : results)
            {
                if (total.points.empty())
                {
                    total.points = std::move(res);
                    continue;
                }
                for (std::size_t i = 0; i < res.size(); ++i)
                    total.points[i].merge(res[i], cap);
            }
        }
        return total;
    }

    double calibrate_noise(const SweepSpec &spec, int jobs)
    {
        spec.validate();
        const CalibrationSpec &cal = spec.calibration;
        const int mg = cal.mg == 0 ? spec.scenario.groups.front() : cal.mg;

        SweepSpec probe = spec;
        probe.rop_grid_dbm = {cal.rop_dbm};
        probe.combiners = {cal.combiner};
        probe.frames_per_point = cal.frames;
        probe.dump_constellations = false;

        auto ber_at = [&](double kappa) {
            probe.scenario.noise.kappa = kappa;
            SweepReport r = run_sweep(probe, jobs);
            const auto &p = r.at(mg, cal.combiner, 0);
            return double(p.errors) / double(p.bits);
        };

        double lo = cal.kappa_lo, hi = cal.kappa_hi;
        double ber_lo = ber_at(lo), ber_hi = ber_at(hi);
        if (!(ber_lo < cal.ber && ber_hi > cal.ber))
            throw std::runtime_error("calibrate_noise: kappa range [" + format_number(lo) + ", " + format_number(hi) +
                                     "] does not bracket BER " + format_number(cal.ber) + " (got " +
                                     format_number(ber_lo) + " .. " + format_number(ber_hi) + ")");
        for (int it = 0; it < 60; ++it)
        {
            const double mid = std::sqrt(lo * hi);
            const double ber = ber_at(mid);
            if (ber < ber_lo || ber > ber_hi)
                throw std::runtime_error("calibrate_noise: BER is not monotone in kappa");
            if (std::abs(ber / cal.ber - 1.0) <= 0.2)
                return mid;
            if (ber < cal.ber)
                lo = mid, ber_lo = ber;
            else
                hi = mid, ber_hi = ber;
        }
        throw std::runtime_error("calibrate_noise: no convergence within 60 bisection steps");
    }

    // ----------------------------------------------------------------- csv

    std::string format_number(double v)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return buf;
    }

    std::string sweep_csv(const SweepReport &r)
    {
        std::ostringstream os;
        os << "mg,combiner,rop_dbm,ber,bit_count,errors,mean_snr_db\n";
        for (const auto &p : r.points)
            os << p.mg << ',' << to_string(p.combiner) << ',' << format_number(p.rop_dbm) << ','
               << format_number(p.bits ? double(p.errors) / double(p.bits) : 0.0) << ',' << p.bits << ',' << p.errors
               << ',' << format_number(p.mean_snr_db()) << '\n';
        return os.str();
    }

    std::string subcarrier_csv(const SweepReport &r, int mg, std::size_t rop_index)
    {
        std::vector<const PointStats *> cols;
        std::vector<CombinerMode> seen;
        for (const auto &p : r.points)
            if (p.mg == mg && std::find(seen.begin(), seen.end(), p.combiner) == seen.end())
            {
                seen.push_back(p.combiner);
                cols.push_back(&r.at(mg, p.combiner, rop_index));
            }
        if (cols.empty())
            throw std::out_of_range("subcarrier_csv: group not in report");

        std::vector<LinkReport> reps;
        for (auto *p : cols)
            reps.push_back(p->report());
        std::ostringstream os;
        os << "subcarrier";
        for (const auto &rep : reps)
            os << ",snr_db_" << to_string(rep.combiner) << ",ber_" << to_string(rep.combiner);
        os << '\n';
        for (std::size_t k = 0; k < reps.front().per_subcarrier.size(); ++k)
        {
            os << k;
            for (const auto &rep : reps)
                os << ',' << format_number(rep.per_subcarrier[k].snr_db) << ','
                   << format_number(rep.per_subcarrier[k].ber);
            os << '\n';
        }
        return os.str();
    }

    std::string constellation_csv(const PointStats &p)
    {
        std::ostringstream os;
        os << "re,im\n";
        for (const auto &z : p.constellation)
            os << format_number(z.real()) << ',' << format_number(z.imag()) << '\n';
        return os.str();
    }

    void write_report(const SweepReport &r, const SweepSpec &spec)
    {
        namespace fs = std::filesystem;
        const fs::path dir(spec.output_dir);
        fs::create_directories(dir);
        auto write = [&](const fs::path &path, const std::string &text) {
            std::ofstream os(path, std::ios::binary);
            if (!os)
                throw std::runtime_error("cannot write " + path.string());
            os << text;
        };
        write(dir / "sweep.csv", sweep_csv(r));
        for (std::size_t ri = 0; ri < spec.rop_grid_dbm.size(); ++ri)
        {
            const std::string rop = format_number(spec.rop_grid_dbm[ri]);
            for (int mg : spec.scenario.groups)
            {
                if (spec.dump_subcarriers)
                    write(dir / ("subcarriers_" + std::to_string(mg) + "_" + rop + ".csv"), subcarrier_csv(r, mg, ri));
                if (spec.dump_constellations)
                    for (auto c : spec.combiners)
                        write(dir / ("constellation_" + std::to_string(mg) + "_" + rop + "_" + to_string(c) + ".csv"),
                              constellation_csv(r.at(mg, c, ri)));
            }
        }
    }
}
