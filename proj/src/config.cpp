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

#include "mgmsim/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace mgmsim
{
    ConfigError::ConfigError(const std::string &where, int line, const std::string &what)
        : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                             (where.empty() ? std::string() : where + ": ") + what),
          where_(where), line_(line)
    {
    }

    namespace
    {
        int line_of(const YAML::Node &n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

        std::string join(const std::string &path, const std::string &key) { return path.empty() ? key : path + "." + key; }

        void check_keys(const YAML::Node &map, const std::string &path, const std::set<std::string> &allowed)
        {
            if (!map.IsMap())
                throw ConfigError(path, line_of(map), "expected a mapping");
            for (const auto &kv : map)
            {
                auto key = kv.first.as<std::string>();
                if (!allowed.count(key))
                    throw ConfigError(join(path, key), line_of(kv.first), "unknown key");
            }
        }

        template <class T>
        T read(const YAML::Node &n, const std::string &path, const char *type)
        {
            try
            {
                return n.as<T>();
            }
            catch (const YAML::Exception &)
            {
                throw ConfigError(path, line_of(n), std::string("expected ") + type);
            }
        }

        double read_double(const YAML::Node &n, const std::string &path) { return read<double>(n, path, "a number"); }
        int read_int(const YAML::Node &n, const std::string &path) { return read<int>(n, path, "an integer"); }

        template <class T>
        std::vector<T> read_list(const YAML::Node &n, const std::string &path, const char *type)
        {
            if (!n.IsSequence())
                throw ConfigError(path, line_of(n), "expected a list");
            std::vector<T> out;
            for (std::size_t i = 0; i < n.size(); ++i)
                out.push_back(read<T>(n[i], path + "[" + std::to_string(i) + "]", type));
            return out;
        }

        IntraCoupling parse_intra(const std::string &s, const std::string &path, int line)
        {
            if (s == "none")
                return IntraCoupling::none;
            if (s == "haar_per_frame")
                return IntraCoupling::haar_per_frame;
            if (s == "haar_sections")
                return IntraCoupling::haar_sections;
            throw ConfigError(path, line, "expected none, haar_per_frame or haar_sections");
        }

        std::string intra_name(IntraCoupling c)
        {
            switch (c)
            {
            case IntraCoupling::none:
                return "none";
            case IntraCoupling::haar_per_frame:
                return "haar_per_frame";
            case IntraCoupling::haar_sections:
                return "haar_sections";
            }
            return "?";
        }

        CrosstalkTable parse_crosstalk(const YAML::Node &n, const std::string &path, const std::vector<int> &groups)
        {
            if (n.IsScalar())
            {
                auto name = n.as<std::string>();
                if (name == "table_1km")
                    return table_1km();
                if (name == "table_18km")
                    return table_18km();
                if (name == "none")
                    return CrosstalkTable::none(groups);
                throw ConfigError(path, line_of(n), "expected table_1km, table_18km, none or an explicit table");
            }
            check_keys(n, path, {"label", "system_length_km", "groups", "xt_db"});
            CrosstalkTable t;
            t.label = n["label"] ? read<std::string>(n["label"], join(path, "label"), "a string") : "custom";
            if (n["system_length_km"])
                t.system_length_km = read_double(n["system_length_km"], join(path, "system_length_km"));
            if (!n["groups"] || !n["xt_db"])
                throw ConfigError(path, line_of(n), "explicit table needs groups and xt_db");
            t.groups = read_list<int>(n["groups"], join(path, "groups"), "an integer");
            const auto rows = n["xt_db"];
            if (!rows.IsSequence())
                throw ConfigError(join(path, "xt_db"), line_of(rows), "expected a list of rows");
            for (std::size_t i = 0; i < rows.size(); ++i)
                t.xt_db.push_back(read_list<double>(rows[i], join(path, "xt_db") + "[" + std::to_string(i) + "]", "a number"));
            try
            {
                t.validate();
            }
            catch (const std::invalid_argument &e)
            {
                throw ConfigError(path, line_of(n), e.what());
            }
            return t;
        }

        SweepSpec from_yaml(const YAML::Node &root)
        {
            if (!root.IsMap())
                throw ConfigError("", line_of(root), "top level must be a mapping");
            check_keys(root, "", {"scenario", "seed", "frames_per_point", "rop_grid_dbm", "combiners", "output_dir",
                                  "guard_samples", "dump_subcarriers", "dump_constellations", "constellation_cap",
                                  "adc_rate_hz", "dmt", "launch", "channel", "calibration"});

            const std::string name =
                root["scenario"] ? read<std::string>(root["scenario"], "scenario", "a string") : "table1_3mg";
            SweepSpec s;
            try
            {
                s = named_scenario(name);
            }
            catch (const std::invalid_argument &e)
            {
                throw ConfigError("scenario", line_of(root["scenario"]), e.what());
            }

            if (auto n = root["seed"])
                s.seed.value = read<std::uint64_t>(n, "seed", "an unsigned 64-bit integer");
            if (auto n = root["frames_per_point"])
                s.frames_per_point = read_int(n, "frames_per_point");
            if (auto n = root["rop_grid_dbm"])
            {
                if (n.IsMap())
                {
                    check_keys(n, "rop_grid_dbm", {"start", "stop", "step"});
                    if (!n["start"] || !n["stop"] || !n["step"])
                        throw ConfigError("rop_grid_dbm", line_of(n), "range form needs start, stop and step");
                    double a = read_double(n["start"], "rop_grid_dbm.start");
                    double b = read_double(n["stop"], "rop_grid_dbm.stop");
                    double d = read_double(n["step"], "rop_grid_dbm.step");
                    if (!(d > 0.0) || b < a)
                        throw ConfigError("rop_grid_dbm", line_of(n), "range needs step > 0 and stop >= start");
                    s.rop_grid_dbm.clear();
                    for (long i = 0; a + double(i) * d <= b + 1e-9 * d; ++i)
                        s.rop_grid_dbm.push_back(a + double(i) * d);
                }
                else
                    s.rop_grid_dbm = read_list<double>(n, "rop_grid_dbm", "a number");
                for (std::size_t i = 1; i < s.rop_grid_dbm.size(); ++i)
                    if (!(s.rop_grid_dbm[i] > s.rop_grid_dbm[i - 1]))
                        throw ConfigError("rop_grid_dbm", line_of(n), "must be strictly increasing");
            }
            if (auto n = root["combiners"])
            {
                s.combiners.clear();
                for (const auto &c : read_list<std::string>(n, "combiners", "a string"))
                {
                    try
                    {
                        s.combiners.push_back(parse_combiner(c));
                    }
                    catch (const std::invalid_argument &e)
                    {
                        throw ConfigError("combiners", line_of(n), e.what());
                    }
                }
            }
            if (auto n = root["output_dir"])
                s.output_dir = read<std::string>(n, "output_dir", "a string");
            if (auto n = root["guard_samples"])
                s.guard_samples = read_int(n, "guard_samples");
            if (auto n = root["dump_subcarriers"])
                s.dump_subcarriers = read<bool>(n, "dump_subcarriers", "true or false");
            if (auto n = root["dump_constellations"])
                s.dump_constellations = read<bool>(n, "dump_constellations", "true or false");
            if (auto n = root["constellation_cap"])
                s.constellation_cap = read_int(n, "constellation_cap");
            if (auto n = root["adc_rate_hz"])
                s.adc_rate = read_double(n, "adc_rate_hz");

            if (auto d = root["dmt"])
            {
                check_keys(d, "dmt", {"fft_size", "k_lo", "k_hi", "cp_len", "clip_ratio", "n_sync", "n_train", "n_data",
                                      "dac_rate_hz"});
                auto &c = s.dmt;
                if (d["fft_size"]) c.fft_size = read_int(d["fft_size"], "dmt.fft_size");
                if (d["k_lo"]) c.k_lo = read_int(d["k_lo"], "dmt.k_lo");
                if (d["k_hi"]) c.k_hi = read_int(d["k_hi"], "dmt.k_hi");
                if (d["cp_len"]) c.cp_len = read_int(d["cp_len"], "dmt.cp_len");
                if (d["clip_ratio"]) c.clip_ratio = read_double(d["clip_ratio"], "dmt.clip_ratio");
                if (d["n_sync"]) c.n_sync = read_int(d["n_sync"], "dmt.n_sync");
                if (d["n_train"]) c.n_train = read_int(d["n_train"], "dmt.n_train");
                if (d["n_data"]) c.n_data = read_int(d["n_data"], "dmt.n_data");
                if (d["dac_rate_hz"]) c.dac_rate = read_double(d["dac_rate_hz"], "dmt.dac_rate_hz");
                try
                {
                    c.validate();
                }
                catch (const std::invalid_argument &e)
                {
                    throw ConfigError("dmt", line_of(d), e.what());
                }
            }

            if (auto l = root["launch"])
            {
                check_keys(l, "launch", {"bias", "modulation_index", "alpha", "launched_mode"});
                if (l["bias"]) s.launch.bias = read_double(l["bias"], "launch.bias");
                if (l["modulation_index"]) s.launch.modulation_index = read_double(l["modulation_index"], "launch.modulation_index");
                if (l["alpha"]) s.launch.alpha = read_double(l["alpha"], "launch.alpha");
                if (l["launched_mode"])
                {
                    int m = read_int(l["launched_mode"], "launch.launched_mode");
                    if (m < 0 || m > 3)
                        throw ConfigError("launch.launched_mode", line_of(l["launched_mode"]), "expected 0..3");
                    s.launch.launched_mode = Mode(m);
                }
            }

            if (auto c = root["channel"])
            {
                check_keys(c, "channel", {"groups", "qam_order", "crosstalk", "intra_coupling", "n_sections", "branch_dgd_s",
                                          "fiber_loss_db_per_km", "length_km", "responsivity", "noise",
                                          "decorrelation_delay", "rx_bandwidth_hz"});
                auto &sc = s.scenario;
                if (c["groups"]) sc.groups = read_list<int>(c["groups"], "channel.groups", "an integer");
                if (c["qam_order"]) s.qam_order = read_list<int>(c["qam_order"], "channel.qam_order", "an integer");
                if (c["crosstalk"]) sc.crosstalk = parse_crosstalk(c["crosstalk"], "channel.crosstalk", sc.groups);
                if (c["intra_coupling"])
                    sc.intra_coupling = parse_intra(read<std::string>(c["intra_coupling"], "channel.intra_coupling", "a string"),
                                                    "channel.intra_coupling", line_of(c["intra_coupling"]));
                if (c["n_sections"]) sc.n_sections = read_int(c["n_sections"], "channel.n_sections");
                if (c["branch_dgd_s"]) sc.branch_dgd = read_double(c["branch_dgd_s"], "channel.branch_dgd_s");
                if (c["fiber_loss_db_per_km"]) sc.fiber_loss_db_per_km = read_double(c["fiber_loss_db_per_km"], "channel.fiber_loss_db_per_km");
                if (c["length_km"]) sc.length_km = read_double(c["length_km"], "channel.length_km");
                if (auto r = c["responsivity"])
                {
                    if (!r.IsSequence())
                        throw ConfigError("channel.responsivity", line_of(r), "expected a list of [plus, minus] pairs");
                    sc.responsivity.clear();
                    for (std::size_t i = 0; i < r.size(); ++i)
                    {
                        const std::string p = "channel.responsivity[" + std::to_string(i) + "]";
                        auto pair = read_list<double>(r[i], p, "a number");
                        if (pair.size() != 2)
                            throw ConfigError(p, line_of(r[i]), "expected [plus, minus]");
                        sc.responsivity.push_back({pair[0], pair[1]});
                    }
                }
                if (auto n = c["noise"])
                {
                    check_keys(n, "channel.noise", {"sigma0_sq", "kappa"});
                    if (n["sigma0_sq"]) sc.noise.sigma0_sq = read_double(n["sigma0_sq"], "channel.noise.sigma0_sq");
                    if (n["kappa"]) sc.noise.kappa = read_double(n["kappa"], "channel.noise.kappa");
                }
                if (c["decorrelation_delay"]) sc.decorrelation_delay = read_int(c["decorrelation_delay"], "channel.decorrelation_delay");
                if (c["rx_bandwidth_hz"]) sc.rx_bandwidth_hz = read_double(c["rx_bandwidth_hz"], "channel.rx_bandwidth_hz");
                try
                {
                    sc.validate();
                }
                catch (const std::invalid_argument &e)
                {
                    throw ConfigError("channel", line_of(c), e.what());
                }
            }

            if (auto k = root["calibration"])
            {
                check_keys(k, "calibration", {"rop_dbm", "ber", "mg", "combiner", "kappa_lo", "kappa_hi", "frames"});
                auto &cal = s.calibration;
                if (k["rop_dbm"]) cal.rop_dbm = read_double(k["rop_dbm"], "calibration.rop_dbm");
                if (k["ber"]) cal.ber = read_double(k["ber"], "calibration.ber");
                if (k["mg"]) cal.mg = read_int(k["mg"], "calibration.mg");
                if (k["combiner"])
                {
                    try
                    {
                        cal.combiner = parse_combiner(read<std::string>(k["combiner"], "calibration.combiner", "a string"));
                    }
                    catch (const std::invalid_argument &e)
                    {
                        throw ConfigError("calibration.combiner", line_of(k["combiner"]), e.what());
                    }
                }
                if (k["kappa_lo"]) cal.kappa_lo = read_double(k["kappa_lo"], "calibration.kappa_lo");
                if (k["kappa_hi"]) cal.kappa_hi = read_double(k["kappa_hi"], "calibration.kappa_hi");
                if (k["frames"]) cal.frames = read_int(k["frames"], "calibration.frames");
            }

            try
            {
                s.validate();
            }
            catch (const std::invalid_argument &e)
            {
                std::string msg = e.what();
                auto colon = msg.find(": ");
                if (colon != std::string::npos && msg.find(' ') > colon)
                    throw ConfigError(msg.substr(0, colon), 0, msg.substr(colon + 2));
                throw ConfigError("", 0, msg);
            }
            return s;
        }
    }

    SweepSpec parse_config_text(const std::string &text)
    {
        YAML::Node root;
        try
        {
            root = YAML::Load(text);
        }
        catch (const YAML::ParserException &e)
        {
            throw ConfigError("", e.mark.line + 1, "parse error: " + e.msg);
        }
        if (root.IsNull())
            root = YAML::Node(YAML::NodeType::Map);
        return from_yaml(root);
    }

    SweepSpec parse_config(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("", 0, "cannot open config file '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_config_text(ss.str());
    }

    std::string emit_config(const SweepSpec &s)
    {
        YAML::Emitter out;
        out.SetDoublePrecision(17);
        out << YAML::BeginMap;
        out << YAML::Key << "scenario" << YAML::Value << s.scenario_name;
        out << YAML::Key << "seed" << YAML::Value << s.seed.value;
        out << YAML::Key << "frames_per_point" << YAML::Value << s.frames_per_point;
        out << YAML::Key << "rop_grid_dbm" << YAML::Value << YAML::Flow << s.rop_grid_dbm;
        out << YAML::Key << "combiners" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (auto c : s.combiners)
            out << to_string(c);
        out << YAML::EndSeq;
        out << YAML::Key << "output_dir" << YAML::Value << s.output_dir;
        out << YAML::Key << "guard_samples" << YAML::Value << s.guard_samples;
        out << YAML::Key << "dump_subcarriers" << YAML::Value << s.dump_subcarriers;
        out << YAML::Key << "dump_constellations" << YAML::Value << s.dump_constellations;
        out << YAML::Key << "constellation_cap" << YAML::Value << s.constellation_cap;
        out << YAML::Key << "adc_rate_hz" << YAML::Value << s.adc_rate;

        out << YAML::Key << "dmt" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "fft_size" << YAML::Value << s.dmt.fft_size;
        out << YAML::Key << "k_lo" << YAML::Value << s.dmt.k_lo;
        out << YAML::Key << "k_hi" << YAML::Value << s.dmt.k_hi;
        out << YAML::Key << "cp_len" << YAML::Value << s.dmt.cp_len;
        out << YAML::Key << "clip_ratio" << YAML::Value << s.dmt.clip_ratio;
        out << YAML::Key << "n_sync" << YAML::Value << s.dmt.n_sync;
        out << YAML::Key << "n_train" << YAML::Value << s.dmt.n_train;
        out << YAML::Key << "n_data" << YAML::Value << s.dmt.n_data;
        out << YAML::Key << "dac_rate_hz" << YAML::Value << s.dmt.dac_rate;
        out << YAML::EndMap;

        out << YAML::Key << "launch" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "bias" << YAML::Value << s.launch.bias;
        out << YAML::Key << "modulation_index" << YAML::Value << s.launch.modulation_index;
        out << YAML::Key << "alpha" << YAML::Value << s.launch.alpha;
        out << YAML::Key << "launched_mode" << YAML::Value << int(s.launch.launched_mode);
        out << YAML::EndMap;

        const auto &sc = s.scenario;
        out << YAML::Key << "channel" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "groups" << YAML::Value << YAML::Flow << sc.groups;
        out << YAML::Key << "qam_order" << YAML::Value << YAML::Flow << s.qam_order;
        out << YAML::Key << "crosstalk" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "label" << YAML::Value << sc.crosstalk.label;
        out << YAML::Key << "system_length_km" << YAML::Value << sc.crosstalk.system_length_km;
        out << YAML::Key << "groups" << YAML::Value << YAML::Flow << sc.crosstalk.groups;
        out << YAML::Key << "xt_db" << YAML::Value << YAML::BeginSeq;
        for (const auto &row : sc.crosstalk.xt_db)
            out << YAML::Flow << row;
        out << YAML::EndSeq << YAML::EndMap;
        out << YAML::Key << "intra_coupling" << YAML::Value << intra_name(sc.intra_coupling);
        out << YAML::Key << "n_sections" << YAML::Value << sc.n_sections;
        out << YAML::Key << "branch_dgd_s" << YAML::Value << sc.branch_dgd;
        out << YAML::Key << "fiber_loss_db_per_km" << YAML::Value << sc.fiber_loss_db_per_km;
        out << YAML::Key << "length_km" << YAML::Value << sc.length_km;
        out << YAML::Key << "responsivity" << YAML::Value << YAML::BeginSeq;
        for (const auto &r : sc.responsivity)
            out << YAML::Flow << std::vector<double>{r.plus, r.minus};
        out << YAML::EndSeq;
        out << YAML::Key << "noise" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "sigma0_sq" << YAML::Value << sc.noise.sigma0_sq;
        out << YAML::Key << "kappa" << YAML::Value << sc.noise.kappa;
        out << YAML::EndMap;
        out << YAML::Key << "decorrelation_delay" << YAML::Value << sc.decorrelation_delay;
        out << YAML::Key << "rx_bandwidth_hz" << YAML::Value << sc.rx_bandwidth_hz;
        out << YAML::EndMap;

        const auto &cal = s.calibration;
        out << YAML::Key << "calibration" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "rop_dbm" << YAML::Value << cal.rop_dbm;
        out << YAML::Key << "ber" << YAML::Value << cal.ber;
        out << YAML::Key << "mg" << YAML::Value << cal.mg;
        out << YAML::Key << "combiner" << YAML::Value << to_string(cal.combiner);
        out << YAML::Key << "kappa_lo" << YAML::Value << cal.kappa_lo;
        out << YAML::Key << "kappa_hi" << YAML::Value << cal.kappa_hi;
        out << YAML::Key << "frames" << YAML::Value << cal.frames;
        out << YAML::EndMap;

        out << YAML::EndMap;
        return std::string(out.c_str()) + "\n";
    }

    std::string config_reference()
    {
        struct Row
        {
            const char *key, *meaning;
        };
        static const Row rows[] = {
            {"scenario", "template the remaining keys override: table1_3mg or table2_2mg"},
            {"seed", "root seed; every random stream is derived from it"},
            {"frames_per_point", "frames simulated per (group, ROP) point"},
            {"rop_grid_dbm", "strictly increasing list, or {start, stop, step}"},
            {"combiners", "subset of mrc, erc, single_plus, single_minus"},
            {"output_dir", "directory for sweep.csv and optional dumps"},
            {"guard_samples", "bias-only samples around each frame"},
            {"dump_subcarriers", "write subcarriers_<mg>_<rop>.csv"},
            {"dump_constellations", "write constellation_<mg>_<rop>_<combiner>.csv"},
            {"constellation_cap", "maximum symbols per constellation file"},
            {"adc_rate_hz", "scope rate; 0 skips the DAC/ADC resampling stages"},
            {"dmt.fft_size", "DFT length N"},
            {"dmt.k_lo, dmt.k_hi", "inclusive payload band, 1 <= k_lo <= k_hi < N/2"},
            {"dmt.cp_len", "cyclic prefix length"},
            {"dmt.clip_ratio", "hard clip level in RMS units, .inf disables"},
            {"dmt.n_sync, dmt.n_train", "synchronization and estimation symbols per frame"},
            {"dmt.n_data", "payload symbols per frame"},
            {"dmt.dac_rate_hz", "simulation sample rate"},
            {"launch.bias", "DC drive V0"},
            {"launch.modulation_index", "AC drive relative to V0, V(t) = index * V0 * v(t)"},
            {"launch.alpha", "electro-optic power ratio"},
            {"launch.launched_mode", "excited mode: 0 (+l,+s), 1 (+l,-s), 2 (-l,+s), 3 (-l,-s)"},
            {"channel.groups", "active mode-group orders"},
            {"channel.qam_order", "4 or 16 per group"},
            {"channel.crosstalk", "table_1km, table_18km, none, or {label, system_length_km, groups, xt_db}"},
            {"channel.intra_coupling", "none, haar_per_frame or haar_sections"},
            {"channel.n_sections", "unitary sections for haar_sections"},
            {"channel.branch_dgd_s", "delay of the -l branch in seconds"},
            {"channel.fiber_loss_db_per_km", "fiber attenuation"},
            {"channel.length_km", "fiber length"},
            {"channel.responsivity", "[plus, minus] per group"},
            {"channel.noise.sigma0_sq", "signal-independent noise variance"},
            {"channel.noise.kappa", "noise variance per mW of mean branch optical power"},
            {"channel.decorrelation_delay", "samples of delay applied to leaked fields"},
            {"channel.rx_bandwidth_hz", "Gaussian 3 dB bandwidth per branch, 0 = flat"},
            {"calibration.rop_dbm, calibration.ber", "target operating point"},
            {"calibration.mg, calibration.combiner", "curve that is calibrated (mg 0 = first group)"},
            {"calibration.kappa_lo, calibration.kappa_hi", "bisection bracket"},
            {"calibration.frames", "frames per bisection step"},
        };
        std::ostringstream os;
        os << "<!-- SPDX-License-Identifier: Apache-2.0 -->\n\n# Configuration reference\n\n"
           << "Generated by `mgmsim validate --reference`. Configs are YAML mappings; unknown keys are rejected.\n\n"
           << "| key | meaning |\n|---|---|\n";
        for (const auto &r : rows)
            os << "| `" << r.key << "` | " << r.meaning << " |\n";
        for (const auto &name : scenario_names())
            os << "\n## Defaults of `" << name << "`\n\n```yaml\n" << emit_config(named_scenario(name)) << "```\n";
        return os.str();
    }
}
