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

// Command line front end: sweep, calibrate, tables, validate.

#include "mgmsim/config.hpp"
#include "mgmsim/harness.hpp"
#include "mgmsim/xtalk.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

using namespace mgmsim;

namespace
{
    constexpr int exit_ok = 0;
    constexpr int exit_config = 2;
    constexpr int exit_runtime = 3;

    struct Common
    {
        std::optional<std::uint64_t> seed;
        int jobs = 1;
        std::string out;
    };

    SweepSpec load(const std::string &path, const Common &c)
    {
        SweepSpec s = parse_config(path);
        if (c.seed)
            s.seed.value = *c.seed;
        if (!c.out.empty())
            s.output_dir = c.out;
        return s;
    }

    void print_table(const CrosstalkTable &t)
    {
        std::printf("%s (%.4g km)\n", t.label.c_str(), t.system_length_km);
        std::printf("%8s", "src\\dst");
        for (int g : t.groups)
            std::printf("%9d", g);
        std::printf("\n");
        for (std::size_t i = 0; i < t.groups.size(); ++i)
        {
            std::printf("%8d", t.groups[i]);
            for (std::size_t j = 0; j < t.groups.size(); ++j)
                if (i == j)
                    std::printf("%9s", "-");
                else
                    std::printf("%9.2f", t.xt_db[i][j]);
            std::printf("\n");
        }
    }

    int tables(bool csv)
    {
        const auto a = table_1km(), b = table_18km();
        if (csv)
        {
            std::cout << to_csv(a) << to_csv(b);
        }
        else
        {
            print_table(a);
            std::printf("\n");
            print_table(b);
            std::printf("\n");
        }
        const std::pair<int, int> pairs[] = {{2, 3}, {3, 4}};
        if (csv)
            std::cout << "pair,delta_length_km,xt_db,xt_db_per_km\n";
        else
            std::printf("fiber-only crosstalk (long minus short system)\n");
        for (auto [g1, g2] : pairs)
        {
            auto f = fiber_only_xt(a, b, g1, g2);
            if (csv)
                std::cout << g1 << "-" << g2 << "," << format_number(f.delta_length_km) << ","
                          << format_number(f.xt_db) << "," << format_number(f.xt_db_per_km) << "\n";
            else
                std::printf("  MG%d <-> MG%d: %.3f dB over %.4g km (%.3f dB/km)\n", g1, g2, f.xt_db, f.delta_length_km,
                            f.xt_db_per_km);
        }
        return exit_ok;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"mgmsim: mode-group multiplexed IM-DD link simulator"};
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App *sub)
    {
        sub->add_option("--seed", common.seed, "override the config seed");
        sub->add_option("--jobs", common.jobs, "worker threads")->check(CLI::Range(1, 1024));
        sub->add_option("--out", common.out, "output directory (sweep) or calibrated config path (calibrate)");
    };

    std::string config_path;
    bool csv = false, reference = false;

    auto *sweep = app.add_subcommand("sweep", "run a BER-vs-ROP sweep and write CSV reports");
    sweep->add_option("config", config_path, "YAML config")->required();
    add_common(sweep);

    auto *calibrate = app.add_subcommand("calibrate", "fit the noise coefficient to the calibration target");
    calibrate->add_option("config", config_path, "YAML config")->required();
    add_common(calibrate);

    auto *tab = app.add_subcommand("tables", "print the embedded crosstalk tables");
    tab->add_flag("--csv", csv, "CSV output");

    auto *val = app.add_subcommand("validate", "check a config and print its canonical form");
    val->add_option("config", config_path, "YAML config");
    val->add_flag("--reference", reference, "print the configuration reference page instead");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }

    try
    {
        if (*tab)
            return tables(csv);

        if (*val)
        {
            if (reference)
            {
                std::cout << config_reference();
                return exit_ok;
            }
            if (config_path.empty())
            {
                std::cerr << "validate: config path required\n";
                return exit_config;
            }
            std::cout << emit_config(parse_config(config_path));
            return exit_ok;
        }

        if (*calibrate)
        {
            Common c = common;
            c.out.clear();
            SweepSpec s = load(config_path, c);
            double kappa = calibrate_noise(s, common.jobs);
            std::printf("kappa = %.6g\n", kappa);
            if (!common.out.empty())
            {
                s.scenario.noise.kappa = kappa;
                std::ofstream f(common.out);
                if (!(f << emit_config(s)))
                    throw std::runtime_error("cannot write '" + common.out + "'");
            }
            return exit_ok;
        }

        if (*sweep)
        {
            SweepSpec s = load(config_path, common);
            auto report = run_sweep(s, common.jobs);
            write_report(report, s);
            std::fprintf(stderr, "wrote %s/sweep.csv (%zu rows)\n", s.output_dir.c_str(), report.points.size());
            return exit_ok;
        }
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return exit_runtime;
}
