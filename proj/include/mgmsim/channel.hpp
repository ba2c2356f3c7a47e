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

#ifndef MGMSIM_CHANNEL_HPP
#define MGMSIM_CHANNEL_HPP

#include "mgmsim/signal.hpp"
#include "mgmsim/xtalk.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <vector>

namespace mgmsim
{
    /// Degenerate modes of one group, ordered (+l,+s), (+l,-s), (-l,+s), (-l,-s).
    /// The +l branch detects modes 0 and 1, the -l branch modes 2 and 3.
    enum class Mode : int
    {
        plus_l_plus_s = 0,
        plus_l_minus_s = 1,
        minus_l_plus_s = 2,
        minus_l_minus_s = 3,
    };

    struct ModeGroupField
    {
        std::array<std::vector<cplx>, 4> envelopes;
        double sample_rate = 1.0;
        int group_order = 0; // |l|

        std::size_t size() const { return envelopes[0].size(); }
        double total_power(std::size_t t) const;
    };

    struct LaunchConfig
    {
        double bias = 1.0;             // V0
        double modulation_index = 1.0; // V(t) = modulation_index * bias * drive(t)
        double alpha = 1.0;            // electro-optic power ratio
        Mode launched_mode = Mode::plus_l_plus_s;

        bool operator==(const LaunchConfig &) const = default;
    };

    enum class IntraCoupling
    {
        none,
        haar_per_frame,
        haar_sections,
    };

    struct NoiseModel
    {
        double sigma0_sq = 0.0; // signal-independent variance
        double kappa = 0.0;     // variance per unit of mean branch optical power (mW)

        bool operator==(const NoiseModel &) const = default;
    };

    struct Responsivity
    {
        double plus = 1.0;
        double minus = 1.0;

        bool operator==(const Responsivity &) const = default;
    };

    struct ChannelScenario
    {
        std::vector<int> groups;        // active |l| values, order of the field vectors
        CrosstalkTable crosstalk;       // must contain every active group
        IntraCoupling intra_coupling = IntraCoupling::haar_per_frame;
        int n_sections = 1;             // used by haar_sections
        double branch_dgd = 0.0;        // s, -l branch relative to +l branch
        double fiber_loss_db_per_km = 0.75;
        double length_km = 1.0;
        std::vector<Responsivity> responsivity; // per group
        NoiseModel noise;
        std::optional<double> rop_dbm;  // detector power setpoint per group; empty = no attenuation
        int decorrelation_delay = 0;    // samples applied to leaked source fields
        double rx_bandwidth_hz = 0.0;   // Gaussian electrical low-pass per branch, 0 = flat

        void validate() const; // throws std::invalid_argument

        bool operator==(const ChannelScenario &) const = default;
    };

    /// Photocurrents of the two receive branches of one group (real valued).
    struct BranchPair
    {
        ComplexWaveform plus;
        ComplexWaveform minus;
    };

    struct BranchCurrents
    {
        std::vector<BranchPair> groups; // aligned with ChannelScenario::groups
    };

    ModeGroupField launch(const ComplexWaveform &drive, const LaunchConfig &lc, int group_order);

    using Unitary4 = Eigen::Matrix4cd;

    /// Haar-distributed 4x4 unitary (QR of a complex Ginibre matrix with the
    /// R diagonal phases moved into Q).
    Unitary4 haar_unitary_4(Seed seed);

    void apply_unitary(const Unitary4 &u, ModeGroupField &field);

    std::vector<ModeGroupField> propagate(std::vector<ModeGroupField> fields, const ChannelScenario &sc, Seed seed);

    BranchCurrents detect(const std::vector<ModeGroupField> &fields, const ChannelScenario &sc, Seed seed);

    /// Zero-phase Gaussian low-pass with 3 dB bandwidth `bandwidth_hz`, applied
    /// to a real-valued sequence through its DFT.
    void gaussian_lowpass_inplace(std::span<cplx> x, double sample_rate, double bandwidth_hz);
}

#endif
