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
#pragma once

#include "qpcas/baselines.hpp"
#include "qpcas/channel.hpp"
#include "qpcas/optimizer.hpp"
#include "qpcas/sysmodel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qpcas
{
    enum class Algorithm
    {
        qpcas,
        qpcas_low,
        qpcas_sdma,
        qgpirs,
        qrzf
    };

    std::string algorithm_name(Algorithm a);
    Algorithm parse_algorithm(const std::string &name);  // throws std::invalid_argument

    enum class OutputFormat
    {
        csv,
        json
    };

    OutputFormat parse_output_format(const std::string &name);

    // One sweep over P, DAC bit groups, kappa and N. Every (trial, point)
    // runs all listed algorithms on the same channel draw.
    struct ExperimentConfig
    {
        SystemConfig system;  // n_antennas, p_max and kappa are overwritten per point
        ChannelParams channel;

        std::vector<double> p_dbm{30.0};
        double ptot_dbm = 40.0;
        std::vector<std::vector<int>> bits{{4, 8, 12, 16}};  // groups of equal size across N
        std::vector<double> kappa{0.4};
        std::vector<int> n_antennas{16};
        std::vector<Algorithm> algorithms{Algorithm::qpcas};

        int n_trials = 1;
        std::uint64_t seed = 1;
        int mc_draws = 1000;  // 0 disables the Monte Carlo estimate
        bool record_wall_time = false;

        std::string output_dir = "results";
        OutputFormat format = OutputFormat::csv;

        void validate() const;  // throws std::invalid_argument
    };

    // Parse a JSON document. Unknown keys are rejected.
    ExperimentConfig parse_experiment_config(const std::string &json_text);
    ExperimentConfig load_experiment_config(const std::string &path);

    // Human-readable list of accepted keys.
    std::string experiment_schema();

    struct TrialRecord
    {
        std::uint64_t seed = 0;
        std::string algorithm;
        int n = 0;
        int k = 0;
        double p_dbm = 0.0;
        double ptot_dbm = 0.0;
        double kappa = 0.0;
        std::string bits;  // e.g. "4-8-12-16"
        double sum_se_lb = 0.0;
        double common_se = 0.0;
        double private_se = 0.0;
        double sum_se_mc = 0.0;
        double mc_stderr = 0.0;
        int n_active = 0;
        std::string active_mask;  // '1'/'0' per antenna, or "error:<reason>"
        double p_tx_w = 0.0;
        double p_cir_w = 0.0;
        double tau = 0.0;
        double mu = 0.0;
        int iters_f = 0;
        int iters_mu = 0;
        double wall_ms = 0.0;

        bool is_error() const { return active_mask.rfind("error:", 0) == 0; }
    };

    bool operator==(const TrialRecord &a, const TrialRecord &b);  // NaN compares equal to NaN

    struct McEstimate
    {
        double mean = 0.0;
        double stderr_ = 0.0;
        double common = 0.0;
        double priv = 0.0;
    };

    // Conditional ergodic sum SE given the estimate: the common rate is the
    // minimum over users of the per-user sample means.
    McEstimate mc_ergodic_se(const CMat &f, const ChannelSet &channels, const QuantizationProfile &profile,
                             double p, double noise, int n_draws, Rng &rng);

    struct BudgetCheck
    {
        double p_tx = 0.0;
        double p_cir = 0.0;
        double total = 0.0;
        bool ok = false;
    };

    inline constexpr double budget_tolerance_w = 1e-9;

    BudgetCheck check_power_budget(const PrecoderSolution &sol, const PowerModel &pm, const SystemConfig &cfg);

    PrecoderSolution run_algorithm(Algorithm a, const ChannelSet &channels, const QuantizationProfile &profile,
                                   const SystemConfig &cfg);

    // Seed of a trial; shared by all sweep points and algorithms of that trial.
    std::uint64_t trial_seed(std::uint64_t master, int trial);

    // Records in canonical order: N, bits, kappa, P, trial, algorithm (as
    // listed in the config). Independent of the worker count.
    std::vector<TrialRecord> run_experiment(const ExperimentConfig &cfg, int workers = 1);

    // -- solver timing ----------------------------------------------------------

    struct SolverTiming
    {
        int n = 0;
        int k = 0;
        int reps = 0;
        double dense_ms = 0.0;  // median wall time of one GPI step (weights precomputed), dense solves
        double sm_ms = 0.0;     // same step through the Sherman-Morrison path
        double dense_solve_ms = 0.0;  // B^-1 x alone, dense
        double sm_solve_ms = 0.0;     // B^-1 x alone, Sherman-Morrison
        double max_deviation = 0.0;   // max |w_dense - w_sm| after the step
    };

    // One IID-mode instance with homogeneous 8-bit DACs; both paths take the
    // same step from the Q-RZF direction.
    SolverTiming time_gpi_step(int n, int k, int reps, std::uint64_t seed);

    // -- results I/O ------------------------------------------------------------

    const std::string &csv_header();
    std::string to_csv(const std::vector<TrialRecord> &records);
    std::string to_json(const std::vector<TrialRecord> &records);
    std::vector<TrialRecord> parse_csv(const std::string &text);
    std::vector<TrialRecord> parse_json(const std::string &text);

    // Writes <dir>/results.csv or <dir>/results.json and returns the path.
    std::string emit_results(const std::vector<TrialRecord> &records, const std::string &dir, OutputFormat format);
    std::vector<TrialRecord> read_results(const std::string &path);
}
