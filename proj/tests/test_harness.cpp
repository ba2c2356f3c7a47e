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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mgmsim;

namespace
{
    // One group, crosstalk off: quick sweeps for structural checks.
    SweepSpec small_spec()
    {
        SweepSpec s = named_scenario("table2_2mg");
        s.scenario.groups = {3};
        s.scenario.responsivity = {{1.0, 0.6}};
        s.scenario.crosstalk = CrosstalkTable::none({3});
        s.qam_order = {4};
        s.rop_grid_dbm = {-6.0, 0.0};
        s.frames_per_point = 6;
        s.calibration.mg = 0;
        s.calibration.frames = 12;
        return s;
    }

    double ber_of(const SweepReport &r, int mg, CombinerMode c, std::size_t i)
    {
        const auto &p = r.at(mg, c, i);
        return double(p.errors) / double(p.bits);
    }
}

TEST_CASE("named scenarios validate")
{
    for (const auto &n : scenario_names())
        CHECK_NOTHROW(named_scenario(n).validate());
    CHECK_THROWS_AS(named_scenario("table3"), std::invalid_argument);
    auto s = named_scenario("table1_3mg");
    CHECK(s.scenario.groups == std::vector<int>{2, 3, 4});
    CHECK(s.qam_order == std::vector<int>{4, 16, 16});
    auto t = named_scenario("table2_2mg");
    CHECK(t.scenario.length_km == doctest::Approx(18.4));
    CHECK(t.qam_order == std::vector<int>{4, 4});
}

TEST_CASE("clean channel gives zero errors on every combiner")
{
    SweepSpec s = named_scenario("table2_2mg");
    s.scenario.crosstalk = CrosstalkTable::none(s.scenario.groups);
    s.scenario.noise = NoiseModel{};
    s.frames_per_point = 1;
    s.rop_grid_dbm = {0.0};
    auto r = run_sweep(s);
    REQUIRE(r.points.size() == 2 * 4);
    for (const auto &p : r.points)
    {
        CHECK(p.errors == 0);
        CHECK(p.bits == s.dmt.payload_bits());
    }
}

TEST_CASE("row layout and csv schema")
{
    auto s = small_spec();
    auto r = run_sweep(s);
    CHECK(r.points.size() == 1 * 4 * 2);
    auto csv = sweep_csv(r);
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    CHECK(line == "mg,combiner,rop_dbm,ber,bit_count,errors,mean_snr_db");
    int rows = 0;
    while (std::getline(is, line))
        ++rows;
    CHECK(rows == 8);
    CHECK(format_number(1.0 / 3.0) == "0.333333");
    CHECK(format_number(-6) == "-6");
}

TEST_CASE("identical output for a fixed seed, serial or threaded")
{
    auto s = small_spec();
    const auto a = sweep_csv(run_sweep(s, 1));
    CHECK(sweep_csv(run_sweep(s, 1)) == a);
    CHECK(sweep_csv(run_sweep(s, 3)) == a);
    s.seed.value = 2;
    CHECK(sweep_csv(run_sweep(s, 1)) != a);
}

TEST_CASE("shards merge by addition")
{
    auto s = small_spec();
    auto full = run_sweep(s);
    auto half = s;
    half.frames_per_point = 3;
    auto a = run_sweep(half);
    SweepReport merged;
    merged.merge(a, 0);
    merged.merge(a, 0);
    for (std::size_t i = 0; i < full.points.size(); ++i)
    {
        CHECK(merged.points[i].bits == 2 * a.points[i].bits);
        CHECK(merged.points[i].errors == 2 * a.points[i].errors);
    }
    CHECK(full.points[0].bits == merged.points[0].bits);
    SweepReport other;
    other.points.resize(1);
    CHECK_THROWS_AS(merged.merge(other, 0), std::invalid_argument);
}

TEST_CASE("noise: zero kappa is error free, doubling kappa raises BER")
{
    auto s = small_spec();
    s.rop_grid_dbm = {-4.0};
    s.frames_per_point = 10;
    s.scenario.noise.kappa = 0.0;
    auto r0 = run_sweep(s);
    for (const auto &p : r0.points)
        CHECK(p.errors == 0);

    s.scenario.noise.kappa = 0.02;
    auto r1 = run_sweep(s);
    s.scenario.noise.kappa = 0.04;
    auto r2 = run_sweep(s);
    for (auto c : s.combiners)
        CHECK(ber_of(r2, 3, c, 0) > ber_of(r1, 3, c, 0));
}

TEST_CASE("calibration hits the target and holds on a fresh seed")
{
    auto s = small_spec();
    s.calibration.rop_dbm = 0.0;
    s.calibration.frames = 40;
    const double kappa = calibrate_noise(s);
    CHECK(kappa > s.calibration.kappa_lo);
    CHECK(kappa < s.calibration.kappa_hi);

    auto probe = s;
    probe.scenario.noise.kappa = kappa;
    probe.rop_grid_dbm = {0.0};
    probe.combiners = {CombinerMode::mrc};
    probe.frames_per_point = 40;
    const double at_cal = ber_of(run_sweep(probe), 3, CombinerMode::mrc, 0);
    CHECK(std::abs(at_cal / fec_threshold - 1.0) <= 0.2);

    probe.seed.value = 12345;
    probe.frames_per_point = 120;
    const double holdout = ber_of(run_sweep(probe), 3, CombinerMode::mrc, 0);
    // fresh frames see fresh Haar draws, so allow for frame-to-frame spread
    CHECK(std::abs(holdout / fec_threshold - 1.0) <= 0.5);

    auto bad = s;
    bad.calibration.kappa_hi = 2e-5;
    CHECK_THROWS_AS(calibrate_noise(bad), std::runtime_error);
}

TEST_CASE("report files")
{
    auto s = small_spec();
    s.frames_per_point = 2;
    s.dump_subcarriers = true;
    s.dump_constellations = true;
    s.constellation_cap = 100;
    s.output_dir = (std::filesystem::temp_directory_path() / "mgmsim_report_test").string();
    std::filesystem::remove_all(s.output_dir);
    auto r = run_sweep(s);
    write_report(r, s);
    namespace fs = std::filesystem;
    CHECK(fs::exists(fs::path(s.output_dir) / "sweep.csv"));
    CHECK(fs::exists(fs::path(s.output_dir) / "subcarriers_3_-6.csv"));
    auto cpath = fs::path(s.output_dir) / "constellation_3_0_mrc.csv";
    REQUIRE(fs::exists(cpath));
    std::ifstream f(cpath);
    std::string line;
    int lines = 0;
    while (std::getline(f, line))
        ++lines;
    CHECK(lines == 101);

    auto sub = subcarrier_csv(r, 3, 0);
    CHECK(sub.rfind("subcarrier,snr_db_mrc,ber_mrc,snr_db_erc", 0) == 0);
    fs::remove_all(s.output_dir);
}
