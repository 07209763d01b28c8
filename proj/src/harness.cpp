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

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace qpcas
{
    McEstimate mc_ergodic_se(const CMat &f, const ChannelSet &channels, const QuantizationProfile &profile,
                             double p, double noise, int n_draws, Rng &rng)
    {
        if (n_draws < 2)
            throw std::invalid_argument("mc_ergodic_se: need at least two draws");
        const Eigen::Index k_users = channels.h_hat.cols();
        const ConditionalSampler sampler(channels);

        RMat common(n_draws, k_users);
        RVec priv(n_draws);
        for (int d = 0; d < n_draws; ++d)
        {
            const StreamRates r = instantaneous_rates(f, sampler.draw(rng), profile, p, noise);
            common.row(d) = r.common.transpose();
            priv(d) = r.private_sum();
        }

        // The ergodic common rate is limited by the weakest user on average.
        Eigen::Index kmin = 0;
        const RVec common_mean = common.colwise().mean().transpose();
        const double common_rate = common_mean.minCoeff(&kmin);
        const RVec per_draw = common.col(kmin) + priv;

        McEstimate out;
        out.common = common_rate;
        out.priv = priv.mean();
        out.mean = per_draw.mean();
        const double var = (per_draw.array() - out.mean).square().sum() / (n_draws - 1);
        out.stderr_ = std::sqrt(var / n_draws);
        return out;
    }

    BudgetCheck check_power_budget(const PrecoderSolution &sol, const PowerModel &pm, const SystemConfig &cfg)
    {
        BudgetCheck c;
        c.p_tx = transmit_power(sol.tau, cfg.p_max);
        c.p_cir = circuit_power(sol.active, pm);
        c.total = total_consumption(c.p_tx, c.p_cir, cfg.pa_efficiency);
        c.ok = c.total <= cfg.p_total + budget_tolerance_w && c.p_tx <= cfg.p_max && sol.tau <= 1.0;
        return c;
    }

    PrecoderSolution run_algorithm(Algorithm a, const ChannelSet &channels, const QuantizationProfile &profile,
                                   const SystemConfig &cfg)
    {
        switch (a)
        {
        case Algorithm::qpcas:
        {
            QpcasOptions opt;
            opt.low_complexity = cfg.low_complexity;
            return solve_qpcas(channels, profile, cfg, opt);
        }
        case Algorithm::qpcas_low:
        {
            QpcasOptions opt;
            opt.low_complexity = true;
            SystemConfig c = cfg;
            c.low_complexity = true;
            return solve_qpcas(channels, profile, c, opt);
        }
        case Algorithm::qpcas_sdma:
            return qpcas_sdma(channels, profile, cfg);
        case Algorithm::qgpirs:
            return qgpirs(channels, profile, cfg);
        case Algorithm::qrzf:
            return qrzf(channels, profile, cfg);
        }
        throw std::invalid_argument("run_algorithm: unknown algorithm");
    }

    std::uint64_t trial_seed(std::uint64_t master, int trial)
    {
        return master ^ static_cast<std::uint64_t>(trial);
    }

    namespace
    {
        constexpr std::uint64_t mc_stream = 0x9e3779b97f4a7c15ULL;

        struct Task
        {
            int n = 0;
            std::size_t bits_index = 0;
            double kappa = 0.0;
            double p_dbm = 0.0;
            int trial = 0;
        };

        std::string bits_label(const std::vector<int> &levels)
        {
            std::string s;
            for (std::size_t i = 0; i < levels.size(); ++i)
            {
                if (i)
                    s += '-';
                s += std::to_string(levels[i]);
            }
            return s;
        }

        std::string reason_token(const std::string &what)
        {
            std::string s;
            for (char ch : what)
                s += (std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_');
            return s.substr(0, 80);
        }

        void fill_error(TrialRecord &r, const std::string &reason)
        {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            r.sum_se_lb = r.common_se = r.private_se = r.sum_se_mc = r.mc_stderr = nan;
            r.p_tx_w = r.p_cir_w = r.tau = r.mu = nan;
            r.n_active = 0;
            r.iters_f = r.iters_mu = 0;
            r.active_mask = "error:" + reason;
        }

        std::vector<TrialRecord> run_task(const ExperimentConfig &cfg, const Task &t)
        {
            SystemConfig sys = cfg.system;
            sys.n_antennas = t.n;
            sys.kappa = t.kappa;
            sys.p_max = dbm_to_watt(t.p_dbm);
            sys.p_total = dbm_to_watt(cfg.ptot_dbm);

            const std::uint64_t seed = trial_seed(cfg.seed, t.trial);
            Rng rng(seed);
            const auto geometry = draw_geometry(sys.n_users, cfg.channel, rng);
            const ChannelSet channels = draw_channels(geometry, t.n, t.kappa, cfg.channel, rng);
            const auto &levels = cfg.bits[t.bits_index];
            const QuantizationProfile profile = QuantizationProfile::from_bits(grouped_bits(t.n, levels));
            const PowerModel pm = PowerModel::make(profile, sys);

            std::vector<TrialRecord> out;
            for (Algorithm a : cfg.algorithms)
            {
                TrialRecord r;
                r.seed = seed;
                r.algorithm = algorithm_name(a);
                r.n = t.n;
                r.k = sys.n_users;
                r.p_dbm = t.p_dbm;
                r.ptot_dbm = cfg.ptot_dbm;
                r.kappa = t.kappa;
                r.bits = bits_label(levels);
                try
                {
                    const auto t0 = std::chrono::steady_clock::now();
                    const PrecoderSolution sol = run_algorithm(a, channels, profile, sys);
                    const auto t1 = std::chrono::steady_clock::now();
                    if (cfg.record_wall_time)
                        r.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

                    const BudgetCheck bc = check_power_budget(sol, pm, sys);
                    if (!bc.ok)
                    {
                        fill_error(r, "budget_violation");
                        out.push_back(r);
                        continue;
                    }
                    const StreamRates lb = lower_bound_rates(sol.f, channels.h_hat, channels.r_err, profile,
                                                             sys.p_max, sys.noise_power);
                    r.sum_se_lb = lb.sum();
                    r.common_se = lb.common_min();
                    r.private_se = lb.private_sum();
                    if (cfg.mc_draws > 0)
                    {
                        Rng mc_rng(seed ^ mc_stream);
                        const McEstimate mc = mc_ergodic_se(sol.f, channels, profile, sys.p_max, sys.noise_power,
                                                            cfg.mc_draws, mc_rng);
                        r.sum_se_mc = mc.mean;
                        r.mc_stderr = mc.stderr_;
                    }
                    else
                    {
                        r.sum_se_mc = r.mc_stderr = std::numeric_limits<double>::quiet_NaN();
                    }
                    r.n_active = count_active(sol.active);
                    r.active_mask.clear();
                    for (bool b : sol.active)
                        r.active_mask += b ? '1' : '0';
                    r.p_tx_w = bc.p_tx;
                    r.p_cir_w = bc.p_cir;
                    r.tau = sol.tau;
                    r.mu = sol.mu;
                    r.iters_f = sol.median_iters_f();
                    r.iters_mu = sol.iters_mu;
                }
                catch (const InfeasibleBudget &)
                {
                    fill_error(r, "infeasible_budget");
                }
                catch (const NumericalError &e)
                {
                    fill_error(r, "numerical_" + reason_token(e.what()));
                }
                catch (const std::exception &e)
                {
                    fill_error(r, reason_token(e.what()));
                }
                out.push_back(r);
            }
            return out;
        }
    }

    std::vector<TrialRecord> run_experiment(const ExperimentConfig &cfg, int workers)
    {
        cfg.validate();
        if (workers < 1)
            throw std::invalid_argument("run_experiment: workers must be >= 1");

        std::vector<Task> tasks;
        for (int n : cfg.n_antennas)
            for (std::size_t b = 0; b < cfg.bits.size(); ++b)
                for (double kappa : cfg.kappa)
                    for (double p : cfg.p_dbm)
                        for (int trial = 0; trial < cfg.n_trials; ++trial)
                            tasks.push_back({n, b, kappa, p, trial});

        std::vector<std::vector<TrialRecord>> slots(tasks.size());
        std::atomic<std::size_t> next{0};
        std::mutex err_mutex;
        std::exception_ptr first_error;
        auto worker = [&]()
        {
            for (std::size_t i = next++; i < tasks.size(); i = next++)
            {
                try
                {
                    slots[i] = run_task(cfg, tasks[i]);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error)
                        first_error = std::current_exception();
                }
            }
        };

        const int n_threads = std::min<int>(workers, static_cast<int>(tasks.size()));
        if (n_threads <= 1)
        {
            worker();
        }
        else
        {
            std::vector<std::thread> pool;
            for (int i = 0; i < n_threads; ++i)
                pool.emplace_back(worker);
            for (auto &th : pool)
                th.join();
        }

        if (first_error)
            std::rethrow_exception(first_error);

        std::vector<TrialRecord> records;
        for (auto &s : slots)
            records.insert(records.end(), s.begin(), s.end());
        return records;
    }

    SolverTiming time_gpi_step(int n, int k, int reps, std::uint64_t seed)
    {
        if (reps < 1)
            throw std::invalid_argument("time_gpi_step: reps must be >= 1");
        SystemConfig cfg;
        cfg.n_antennas = n;
        cfg.n_users = k;
        cfg.validate();
        ChannelParams params;
        Rng rng(seed);
        const auto geometry = draw_geometry(k, params, rng);
        const ChannelSet channels = draw_channels(geometry, n, cfg.kappa, params, rng);
        const QuantizationProfile profile = QuantizationProfile::from_bits(std::vector<int>(n, 8));
        const PowerModel pm = PowerModel::make(profile, cfg);
        const RateMatrices m = assemble_rate_matrices(channels, profile, 1.0, cfg.p_max, cfg.noise_power, true);
        LagrangianSettings ls;
        ls.a = cfg.smoothing_a;
        ls.rho = cfg.indicator_rho;
        ls.p_total = cfg.p_total;
        ls.mu = 0.5;
        const CMat w = initial_direction(channels, profile, cfg, true);
        const KktWeights kw = kkt_weights(w, m, pm, ls);

        auto median_ms = [reps](auto &&fn)
        {
            std::vector<double> ms;
            for (int r = 0; r < reps; ++r)
            {
                const auto t0 = std::chrono::steady_clock::now();
                fn();
                const auto t1 = std::chrono::steady_clock::now();
                ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
            }
            std::nth_element(ms.begin(), ms.begin() + ms.size() / 2, ms.end());
            return ms[ms.size() / 2];
        };
        auto time_path = [&](SolverPath path, CMat &out) { return median_ms([&] { out = gpi_step(kw, m, w, path); }); };
        const CMat aw = apply_a_kkt(kw, m, w);
        CMat sink;

        SolverTiming t;
        t.n = n;
        t.k = k;
        t.reps = reps;
        CMat w_dense, w_sm;
        t.dense_ms = time_path(SolverPath::dense, w_dense);
        t.sm_ms = time_path(SolverPath::sherman_morrison, w_sm);
        t.dense_solve_ms = median_ms([&] { sink = solve_b_dense(kw, m, aw); });
        t.sm_solve_ms = median_ms([&] { sink = solve_b_sm(kw, m, aw); });
        t.max_deviation = (w_dense - w_sm).cwiseAbs().maxCoeff();
        return t;
    }
}
