// SPDX-License-Identifier: Apache-2.0
//
// qpcas - joint precoding, antenna selection and power control for
// quantized MU-MIMO rate-splitting downlinks
// Copyright (C) 2026 The qpcas Authors
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
#include "qpcas/harness.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qpcas
{
    using json = nlohmann::json;

    std::string algorithm_name(Algorithm a)
    {
        switch (a)
        {
        case Algorithm::qpcas:
            return "qpcas";
        case Algorithm::qpcas_low:
            return "qpcas_low";
        case Algorithm::qpcas_sdma:
            return "qpcas_sdma";
        case Algorithm::qgpirs:
            return "qgpirs";
        case Algorithm::qrzf:
            return "qrzf";
        }
        return "unknown";
    }

    Algorithm parse_algorithm(const std::string &name)
    {
        for (Algorithm a : {Algorithm::qpcas, Algorithm::qpcas_low, Algorithm::qpcas_sdma, Algorithm::qgpirs,
                            Algorithm::qrzf})
            if (algorithm_name(a) == name)
                return a;
        throw std::invalid_argument("unknown algorithm '" + name +
                                    "' (expected qpcas | qpcas_low | qpcas_sdma | qgpirs | qrzf)");
    }

    OutputFormat parse_output_format(const std::string &name)
    {
        if (name == "csv")
            return OutputFormat::csv;
        if (name == "json")
            return OutputFormat::json;
        throw std::invalid_argument("unknown output format '" + name + "' (expected csv | json)");
    }

    void ExperimentConfig::validate() const
    {
        auto fail = [](const std::string &what) { throw std::invalid_argument("ExperimentConfig: " + what); };
        if (p_dbm.empty() || bits.empty() || kappa.empty() || n_antennas.empty() || algorithms.empty())
            fail("sweep axes and algorithm list must be non-empty");
        if (n_trials < 1)
            fail("n_trials must be >= 1");
        if (mc_draws < 0)
            fail("mc_draws must be >= 0");
        for (const auto &levels : bits)
        {
            if (levels.empty())
                fail("empty bits group");
            for (int b : levels)
                if (b < 0 || b > 24)
                    fail("bits must lie in [0, 24]");
        }
        for (int n : n_antennas)
            for (const auto &levels : bits)
                if (n <= 0 || n % static_cast<int>(levels.size()) != 0)
                    fail("every N must be a positive multiple of the number of bit groups");
        for (double k : kappa)
            if (!(k >= 0.0 && k <= 1.0))
                fail("kappa must lie in [0, 1]");
        SystemConfig probe = system;
        probe.n_antennas = n_antennas.front();
        probe.p_max = dbm_to_watt(p_dbm.front());
        probe.p_total = dbm_to_watt(ptot_dbm);
        probe.kappa = kappa.front();
        probe.validate();
        if (!(channel.min_distance_m > 0.0 && channel.cell_radius_m > channel.min_distance_m))
            fail("require 0 < min_distance_m < cell_radius_m");
        if (!(channel.angular_spread_rad > 0.0))
            fail("angular_spread_rad must be positive");
    }

    namespace
    {
        // Rejects keys outside the allowed set so that typos fail loudly.
        void check_keys(const json &obj, const std::set<std::string> &allowed, const std::string &where)
        {
            if (!obj.is_object())
                throw std::invalid_argument(where + ": expected an object");
            for (auto it = obj.begin(); it != obj.end(); ++it)
                if (!allowed.count(it.key()))
                    throw std::invalid_argument(where + ": unknown key '" + it.key() + "'");
        }

        // Scalar or array, always returned as a vector.
        template <typename T>
        std::vector<T> as_list(const json &v)
        {
            if (v.is_array())
                return v.get<std::vector<T>>();
            return {v.get<T>()};
        }

        template <typename T>
        void read(const json &obj, const char *key, T &out)
        {
            if (obj.contains(key))
                out = obj.at(key).get<T>();
        }

        const std::set<std::string> top_keys{"n_users", "n_antennas", "p_dbm",     "ptot_dbm", "bits",
                                             "kappa",   "algorithms", "n_trials",  "seed",     "mc_draws",
                                             "record_wall_time", "low_complexity", "output", "hardware",
                                             "solver",  "channel"};
        const std::set<std::string> output_keys{"dir", "format"};
        const std::set<std::string> hardware_keys{"pa_efficiency", "sampling_rate_hz", "bandwidth_hz",
                                                  "noise_figure_db", "p_lo_w", "p_lp_w", "p_m_w", "p_h_w"};
        const std::set<std::string> solver_keys{"smoothing_a", "indicator_rho", "eps_gpi", "t_max", "eps_f",
                                                "t_f_max", "eps_tau", "t_tau_max", "t_mu_max", "eps_as",
                                                "delta_gd", "delta_bm", "tau_min", "armijo_c",
                                                "armijo_max_halvings", "feasibility"};
        const std::set<std::string> channel_keys{"cell_radius_m", "min_distance_m", "reference_distance_m",
                                                 "pathloss_exponent", "carrier_hz", "shadowing_std_db",
                                                 "angular_spread_rad", "aod_center_range_rad",
                                                 "max_aod_difference_rad"};
    }

    ExperimentConfig parse_experiment_config(const std::string &json_text)
    {
        json doc;
        try
        {
            doc = json::parse(json_text);
        }
        catch (const json::parse_error &e)
        {
            throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
        }

        ExperimentConfig cfg;
        try
        {
            check_keys(doc, top_keys, "config");
            read(doc, "n_users", cfg.system.n_users);
            if (doc.contains("n_antennas"))
                cfg.n_antennas = as_list<int>(doc["n_antennas"]);
            if (doc.contains("p_dbm"))
                cfg.p_dbm = as_list<double>(doc["p_dbm"]);
            read(doc, "ptot_dbm", cfg.ptot_dbm);
            if (doc.contains("bits"))
            {
                const json &b = doc["bits"];
                cfg.bits.clear();
                // A flat list is one group; a list of lists sweeps over groups.
                const bool nested = b.is_array() && !b.empty() && b.front().is_array();
                if (nested)
                    for (const auto &entry : b)
                        cfg.bits.push_back(as_list<int>(entry));
                else
                    cfg.bits.push_back(as_list<int>(b));
            }
            if (doc.contains("kappa"))
                cfg.kappa = as_list<double>(doc["kappa"]);
            if (doc.contains("algorithms"))
            {
                cfg.algorithms.clear();
                for (const auto &name : as_list<std::string>(doc["algorithms"]))
                    cfg.algorithms.push_back(parse_algorithm(name));
            }
            read(doc, "n_trials", cfg.n_trials);
            read(doc, "seed", cfg.seed);
            read(doc, "mc_draws", cfg.mc_draws);
            read(doc, "record_wall_time", cfg.record_wall_time);
            read(doc, "low_complexity", cfg.system.low_complexity);

            if (doc.contains("output"))
            {
                const json &o = doc["output"];
                check_keys(o, output_keys, "config.output");
                read(o, "dir", cfg.output_dir);
                if (o.contains("format"))
                    cfg.format = parse_output_format(o["format"].get<std::string>());
            }
            if (doc.contains("hardware"))
            {
                const json &h = doc["hardware"];
                check_keys(h, hardware_keys, "config.hardware");
                read(h, "pa_efficiency", cfg.system.pa_efficiency);
                read(h, "sampling_rate_hz", cfg.system.sampling_rate);
                double bw = 150e6, nf = 5.0;
                read(h, "bandwidth_hz", bw);
                read(h, "noise_figure_db", nf);
                cfg.system.noise_power = thermal_noise_power(bw, nf);
                read(h, "p_lo_w", cfg.system.circuit.p_lo);
                read(h, "p_lp_w", cfg.system.circuit.p_lp);
                read(h, "p_m_w", cfg.system.circuit.p_m);
                read(h, "p_h_w", cfg.system.circuit.p_h);
            }
            if (doc.contains("solver"))
            {
                const json &s = doc["solver"];
                check_keys(s, solver_keys, "config.solver");
                SystemConfig &c = cfg.system;
                read(s, "smoothing_a", c.smoothing_a);
                read(s, "indicator_rho", c.indicator_rho);
                read(s, "eps_gpi", c.eps_gpi);
                read(s, "t_max", c.t_max);
                read(s, "eps_f", c.eps_f);
                read(s, "t_f_max", c.t_f_max);
                read(s, "eps_tau", c.eps_tau);
                read(s, "t_tau_max", c.t_tau_max);
                read(s, "t_mu_max", c.t_mu_max);
                read(s, "eps_as", c.eps_as);
                read(s, "delta_gd", c.delta_gd);
                read(s, "delta_bm", c.delta_bm);
                read(s, "tau_min", c.tau_min);
                read(s, "armijo_c", c.armijo_c);
                read(s, "armijo_max_halvings", c.armijo_max_halvings);
                if (s.contains("feasibility"))
                {
                    const std::string mode = s["feasibility"].get<std::string>();
                    if (mode == "smooth")
                        c.feasibility = FeasibilityMode::smooth;
                    else if (mode == "hard")
                        c.feasibility = FeasibilityMode::hard;
                    else
                        throw std::invalid_argument("config.solver.feasibility: expected smooth | hard");
                }
            }
            if (doc.contains("channel"))
            {
                const json &c = doc["channel"];
                check_keys(c, channel_keys, "config.channel");
                ChannelParams &p = cfg.channel;
                read(c, "cell_radius_m", p.cell_radius_m);
                read(c, "min_distance_m", p.min_distance_m);
                read(c, "reference_distance_m", p.reference_distance_m);
                read(c, "pathloss_exponent", p.pathloss_exponent);
                read(c, "carrier_hz", p.carrier_hz);
                read(c, "shadowing_std_db", p.shadowing_std_db);
                read(c, "angular_spread_rad", p.angular_spread_rad);
                read(c, "aod_center_range_rad", p.aod_center_range_rad);
                read(c, "max_aod_difference_rad", p.max_aod_difference_rad);
            }
        }
        catch (const json::exception &e)
        {
            throw std::invalid_argument(std::string("config: wrong value type: ") + e.what());
        }
        cfg.validate();
        return cfg;
    }

    ExperimentConfig load_experiment_config(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open config file '" + path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        try
        {
            return parse_experiment_config(ss.str());
        }
        catch (const std::invalid_argument &e)
        {
            throw std::invalid_argument(path + ": " + e.what());
        }
    }

    std::string experiment_schema()
    {
        return R"(Experiment config (JSON). All keys optional; unknown keys are errors.
  n_users            int                 K (default 4)
  n_antennas         int | [int]         N sweep (default [16])
  p_dbm              num | [num]         max transmit power P sweep [dBm] (default [30])
  ptot_dbm           num                 total power budget P_tot [dBm] (default 40)
  bits               [int] | [[int]]     one DAC bit group, or a list of groups to sweep; each group is split evenly over N (default [4,8,12,16]); 0 = ideal DAC
  kappa              num | [num]         CSIT error parameter sweep (default [0.4])
  algorithms         str | [str]         qpcas | qpcas_low | qpcas_sdma | qgpirs | qrzf (default [qpcas])
  n_trials           int                 channel draws per sweep point (default 1)
  seed               uint                master seed (default 1)
  mc_draws           int                 conditional draws for sum_se_mc; 0 disables (default 1000)
  record_wall_time   bool                fill wall_ms (breaks byte-identical output; default false)
  low_complexity     bool                IID error model + Sherman-Morrison solves for qpcas/qgpirs
  output   { dir: str, format: csv | json }
  hardware { pa_efficiency, sampling_rate_hz, bandwidth_hz, noise_figure_db, p_lo_w, p_lp_w, p_m_w, p_h_w }
  solver   { smoothing_a, indicator_rho, eps_gpi, t_max, eps_f, t_f_max, eps_tau, t_tau_max, t_mu_max,
             eps_as, delta_gd, delta_bm, tau_min, armijo_c, armijo_max_halvings, feasibility: smooth | hard }
  channel  { cell_radius_m, min_distance_m, reference_distance_m, pathloss_exponent, carrier_hz,
             shadowing_std_db, angular_spread_rad, aod_center_range_rad, max_aod_difference_rad }
)";
    }
}
