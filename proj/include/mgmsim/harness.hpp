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

#ifndef MGMSIM_HARNESS_HPP
#define MGMSIM_HARNESS_HPP

#include "mgmsim/channel.hpp"
#include "mgmsim/dmt.hpp"
#include "mgmsim/metrics.hpp"
#include "mgmsim/rx_dsp.hpp"

#include <map>
#include <string>
#include <vector>

namespace mgmsim
{
    /// Target operating point for noise calibration.
    struct CalibrationSpec
    {
        double rop_dbm = 0.0;
        double ber = fec_threshold;
        int mg = 0; // 0 = first scenario group
        CombinerMode combiner = CombinerMode::mrc;
        double kappa_lo = 1e-5;
        double kappa_hi = 10.0;
        int frames = 40;

        bool operator==(const CalibrationSpec &) const = default;
    };

    struct SweepSpec
    {
        std::string scenario_name = "table1_3mg";
        ChannelScenario scenario; // rop_dbm is set per sweep point
        DmtConfig dmt;            // qam_order is set per group
        std::vector<int> qam_order; // per scenario group
        LaunchConfig launch;
        double adc_rate = 0.0; // Hz; >0 inserts DAC->ADC->DSP rate conversions
        std::vector<double> rop_grid_dbm;
        std::vector<CombinerMode> combiners;
        int frames_per_point = 200;
        Seed seed{1};
        std::string output_dir = "out";
        int guard_samples = 512;
        bool dump_subcarriers = false;
        bool dump_constellations = false;
        int constellation_cap = 4096;
        CalibrationSpec calibration;

        void validate() const; // throws ConfigError-compatible std::invalid_argument

        bool operator==(const SweepSpec &) const = default;
    };

    /// Names accepted by `named_scenario`.
    std::vector<std::string> scenario_names();

    /// Built-in experiment templates: "table1_3mg" (1 km, |l| = 2,3,4,
    /// QPSK/16QAM/16QAM) and "table2_2mg" (18.4 km, |l| = 3,4, QPSK).
    SweepSpec named_scenario(const std::string &name);

    /// Raw accumulators of one (group, ROP, combiner) point; everything
    /// reported is derived from these, so shards merge by addition.
    struct PointStats
    {
        int mg = 0;
        CombinerMode combiner = CombinerMode::mrc;
        double rop_dbm = 0.0;
        std::size_t errors = 0;
        std::size_t bits = 0;
        std::size_t frames = 0;
        std::size_t frames_lost = 0;
        std::vector<double> signal_power; // per subcarrier
        std::vector<double> error_power;  // per subcarrier
        std::vector<std::size_t> sc_errors;
        std::vector<std::size_t> sc_bits;
        std::vector<cplx> constellation; // first samples, capped

        void merge(const PointStats &other, std::size_t constellation_cap);
        LinkReport report() const;
        double mean_snr_db() const;
    };

    struct SweepReport
    {
        std::vector<PointStats> points; // ordered by group, combiner, ROP

        const PointStats &at(int mg, CombinerMode c, std::size_t rop_index) const;
        std::vector<CurvePoint> curve(int mg, CombinerMode c) const;
        void merge(const SweepReport &other, std::size_t constellation_cap);
    };

    SweepReport run_sweep(const SweepSpec &spec, int jobs = 1);

    /// Bisection on log(kappa) until the simulated BER at the target point is
    /// within 20 % of the target. Throws std::runtime_error if the search
    /// range does not bracket the target.
    double calibrate_noise(const SweepSpec &spec, int jobs = 1);

    std::string sweep_csv(const SweepReport &r);
    std::string subcarrier_csv(const SweepReport &r, int mg, std::size_t rop_index);
    std::string constellation_csv(const PointStats &p);

    /// Writes sweep.csv plus the optional per-subcarrier and constellation files.
    void write_report(const SweepReport &r, const SweepSpec &spec);

    /// %.6g formatting used for every number in the CSV outputs.
    std::string format_number(double v);
}

#endif
