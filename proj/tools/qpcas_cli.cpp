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
#include "qpcas/kernels.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace
{
    int run_and_emit(const qpcas::ExperimentConfig &cfg, int workers)
    {
        const auto records = qpcas::run_experiment(cfg, workers);
        const std::string path = qpcas::emit_results(records, cfg.output_dir, cfg.format);
        int errors = 0;
        for (const auto &r : records)
            errors += r.is_error();
        std::fprintf(stderr, "%zu records (%d error rows) -> %s\n", records.size(), errors, path.c_str());
        return 0;
    }

    std::vector<int> parse_levels(const std::string &text)
    {
        std::vector<int> out;
        std::stringstream ss(text);
        for (std::string tok; std::getline(ss, tok, ',');)
            out.push_back(std::stoi(tok));
        return out;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Joint precoding, antenna selection and power control for quantized MU-MIMO downlinks"};
    app.require_subcommand(1);

    // run
    auto *run = app.add_subcommand("run", "Run an experiment described by a JSON config");
    std::string config_path, out_dir, format;
    int workers = 1;
    run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    run->add_option("--format", format, "csv | json (overrides output.format)")
        ->check(CLI::IsMember({"csv", "json"}));

    // sweep
    auto *sweep = app.add_subcommand("sweep", "Grid sweep from command-line axes");
    std::vector<double> s_p{15, 20, 25, 30, 35, 40}, s_kappa{0.4};
    std::vector<int> s_n{16};
    std::vector<std::string> s_bits{"4,8,12,16"}, s_algos{"qpcas", "qpcas_sdma", "qgpirs", "qrzf"};
    double s_ptot = 40.0;
    int s_k = 4, s_trials = 10, s_mc = 1000, s_workers = 1;
    std::uint64_t s_seed = 1;
    std::string s_out = "results", s_format = "csv";
    bool s_low = false;
    sweep->add_option("--p-dbm", s_p, "Max transmit power grid [dBm]");
    sweep->add_option("--ptot-dbm", s_ptot, "Total power budget [dBm]");
    sweep->add_option("--bits", s_bits, "Bit groups, e.g. 4,8,12,16 (repeatable)");
    sweep->add_option("--kappa", s_kappa, "CSIT error grid");
    sweep->add_option("--n", s_n, "Antenna counts");
    sweep->add_option("--k", s_k, "Users");
    sweep->add_option("--algorithms", s_algos, "qpcas | qpcas_low | qpcas_sdma | qgpirs | qrzf");
    sweep->add_option("--trials", s_trials, "Channel draws per point");
    sweep->add_option("--seed", s_seed, "Master seed");
    sweep->add_option("--mc-draws", s_mc, "Conditional draws for sum_se_mc (0 disables)");
    sweep->add_option("--workers", s_workers, "Worker threads")->check(CLI::PositiveNumber);
    sweep->add_option("--out", s_out, "Output directory");
    sweep->add_option("--format", s_format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    sweep->add_flag("--low-complexity", s_low, "IID error model with Sherman-Morrison solves");

    // validate
    auto *validate = app.add_subcommand("validate", "Check a config against the schema");
    std::string v_config;
    bool v_schema = false;
    validate->add_option("--config", v_config, "Experiment config (JSON)");
    validate->add_flag("--schema", v_schema, "Print the accepted keys");

    // bench
    auto *bench = app.add_subcommand("bench", "Time one GPI step: Sherman-Morrison vs dense solves");
    std::vector<int> b_n{32, 64, 128, 256};
    int b_k = 4, b_reps = 5;
    std::uint64_t b_seed = 1;
    std::string b_out;
    bench->add_option("--n", b_n, "Antenna counts");
    bench->add_option("--k", b_k, "Users");
    bench->add_option("--reps", b_reps, "Repetitions (median reported)")->check(CLI::PositiveNumber);
    bench->add_option("--seed", b_seed, "Channel seed");
    bench->add_option("--out", b_out, "CSV file (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
        {
            qpcas::ExperimentConfig cfg = qpcas::load_experiment_config(config_path);
            if (!out_dir.empty())
                cfg.output_dir = out_dir;
            if (!format.empty())
                cfg.format = qpcas::parse_output_format(format);
            return run_and_emit(cfg, workers);
        }
        if (*sweep)
        {
            qpcas::ExperimentConfig cfg;
            cfg.system.n_users = s_k;
            cfg.system.low_complexity = s_low;
            cfg.p_dbm = s_p;
            cfg.ptot_dbm = s_ptot;
            cfg.bits.clear();
            for (const auto &b : s_bits)
                cfg.bits.push_back(parse_levels(b));
            cfg.kappa = s_kappa;
            cfg.n_antennas = s_n;
            cfg.algorithms.clear();
            for (const auto &a : s_algos)
                cfg.algorithms.push_back(qpcas::parse_algorithm(a));
            cfg.n_trials = s_trials;
            cfg.seed = s_seed;
            cfg.mc_draws = s_mc;
            cfg.output_dir = s_out;
            cfg.format = qpcas::parse_output_format(s_format);
            cfg.validate();
            return run_and_emit(cfg, s_workers);
        }
        if (*validate)
        {
            if (v_schema)
                std::cout << qpcas::experiment_schema();
            if (!v_config.empty())
            {
                const auto cfg = qpcas::load_experiment_config(v_config);
                std::size_t points = cfg.n_antennas.size() * cfg.bits.size() * cfg.kappa.size() * cfg.p_dbm.size();
                std::printf("ok: %zu sweep points x %d trials x %zu algorithms\n", points, cfg.n_trials,
                            cfg.algorithms.size());
            }
            else if (!v_schema)
            {
                std::fprintf(stderr, "validate: pass --config <file> or --schema\n");
                return 2;
            }
            return 0;
        }
        if (*bench)
        {
            std::ostringstream csv;
            csv << "N,K,reps,dense_ms,sm_ms,speedup,dense_solve_ms,sm_solve_ms,max_deviation,isa\n";
            for (int n : b_n)
            {
                const auto t = qpcas::time_gpi_step(n, b_k, b_reps, b_seed);
                char line[256];
                std::snprintf(line, sizeof line, "%d,%d,%d,%.6g,%.6g,%.4g,%.6g,%.6g,%.3g,%s\n", t.n, t.k, t.reps,
                              t.dense_ms, t.sm_ms, t.dense_ms / t.sm_ms, t.dense_solve_ms, t.sm_solve_ms,
                              t.max_deviation, qpcas::kernels::active().name);
                csv << line;
            }
            if (b_out.empty())
            {
                std::cout << csv.str();
            }
            else
            {
                std::ofstream out(b_out);
                if (!out)
                    throw std::runtime_error("cannot write '" + b_out + "'");
                out << csv.str();
            }
            return 0;
        }
    }
    catch (const std::invalid_argument &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
