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
// Acceptance checks. Each criterion prints exactly one PASS or FAIL line on
// stdout; supporting numbers go to stderr.

#include <CLI11.hpp>

#include "oracles/dense_model.hpp"
#include "oracles/finite_diff.hpp"
#include "qpcas/harness.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

using namespace qpcas;

namespace
{
    struct Options
    {
        int seeds = 50;
        int workers = 1;
    };

    struct Outcome
    {
        bool pass = false;
        std::string detail;
    };

    std::string fmt(const char *f, auto... args)
    {
        char buf[512];
        std::snprintf(buf, sizeof buf, f, args...);
        return buf;
    }

    void note(const std::string &s)
    {
        std::fprintf(stderr, "  %s\n", s.c_str());
    }

    // Draws shared by every scenario: the same seed gives the same users.
    struct Scenario
    {
        ChannelSet channels;
        QuantizationProfile profile;
        SystemConfig cfg;
    };

    Scenario scenario(int n, int k, double p_dbm, double ptot_dbm, const std::vector<int> &levels, double kappa,
                      std::uint64_t seed)
    {
        Scenario s;
        s.cfg.n_antennas = n;
        s.cfg.n_users = k;
        s.cfg.p_max = dbm_to_watt(p_dbm);
        s.cfg.p_total = dbm_to_watt(ptot_dbm);
        s.cfg.kappa = kappa;
        ChannelParams params;
        Rng rng(seed);
        const auto geometry = draw_geometry(k, params, rng);
        s.channels = draw_channels(geometry, n, kappa, params, rng);
        s.profile = QuantizationProfile::from_bits(grouped_bits(n, levels));
        return s;
    }

    double mean(const std::vector<double> &v)
    {
        return v.empty() ? std::nan("") : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    }

    double median(std::vector<double> v)
    {
        if (v.empty())
            return std::nan("");
        std::sort(v.begin(), v.end());
        const std::size_t h = v.size() / 2;
        return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
    }

    // Mean sum SE (conditional lower bound) per (algorithm, sweep value).
    using Table = std::map<std::string, std::map<double, std::vector<double>>>;

    Table tabulate(const std::vector<TrialRecord> &recs, const std::function<double(const TrialRecord &)> &key,
                   int &errors)
    {
        Table t;
        errors = 0;
        for (const auto &r : recs)
        {
            if (r.is_error())
            {
                ++errors;
                continue;
            }
            t[r.algorithm][key(r)].push_back(r.sum_se_lb);
        }
        return t;
    }

    ExperimentConfig power_sweep_config(const Options &o)
    {
        ExperimentConfig c;
        c.system.n_users = 4;
        c.n_antennas = {16};
        c.bits = {{4, 8, 12, 16}};
        c.kappa = {0.4};
        c.ptot_dbm = 40.0;
        c.p_dbm = {15.0, 20.0, 25.0, 30.0, 35.0, 40.0};
        c.algorithms = {Algorithm::qpcas, Algorithm::qpcas_sdma, Algorithm::qgpirs, Algorithm::qrzf};
        c.n_trials = o.seeds;
        c.seed = 2024;
        c.mc_draws = 0;
        return c;
    }

    // -- criteria ----------------------------------------------------------------

    Outcome master_identity(const Options &)
    {
        Rng rng(1);
        const double kappas[] = {0.0, 0.4, 1.0};
        double worst = 0.0, worst_oracle = 0.0;
        const auto t0 = std::chrono::steady_clock::now();
        for (int t = 0; t < 1000; ++t)
        {
            const int k = 1 + t % 4;
            const int n = std::min(8, k + 1 + (t / 4) % (8 - k));
            const auto inst = testing_support::synthetic_instance(n, k, kappas[t % 3], rng);
            const CMat w = testing_support::random_direction(n, k, rng);
            const CMat f = precoder_from_direction(w, inst.profile.alpha, inst.tau);
            const auto m = assemble_rate_matrices(inst.channels, inst.profile, inst.tau, inst.p, inst.noise, false);
            const auto q = evaluate_quadratics(m, w);
            const auto lb = lower_bound_rates(f, inst.channels.h_hat, inst.channels.r_err, inst.profile, inst.p,
                                              inst.noise);
            const auto ref = oracle::lower_bound(f, inst.channels.h_hat, inst.channels.r_err, inst.profile.alpha,
                                                 inst.profile.beta, inst.p, inst.noise);
            // Relative error on 1 + SINR, i.e. on the quotients themselves.
            auto rel = [](double quot, double rate) { return std::abs(quot - std::exp2(rate)) / std::exp2(rate); };
            for (int u = 0; u < k; ++u)
            {
                const double qc = q.num_c(u) / q.den_c(u), qp = q.num_p(u) / q.den_p(u);
                worst = std::max({worst, rel(qc, lb.common(u)), rel(qp, lb.priv(u))});
                worst_oracle = std::max({worst_oracle, rel(qc, ref.common(u)), rel(qp, ref.priv(u))});
            }
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double e = std::max(worst, worst_oracle);
        return {e <= 1e-10 && secs < 30.0,
                fmt("max rel err %.2e vs direct, %.2e vs oracle (tol 1e-10), %.1f s for 1000 instances", worst,
                    worst_oracle, secs)};
    }

    Outcome jensen_bound(const Options &)
    {
        const int instances = 200, draws = 10000;
        int ok = 0;
        double worst_gap = -1e300;
        const double kappas[] = {0.2, 0.4, 0.6, 0.8, 1.0};
        for (int t = 0; t < instances; ++t)
        {
            const int n = t % 2 ? 16 : 8, k = t % 4 < 2 ? 2 : 4;
            const double p_dbm = 15.0 + 5.0 * (t % 6);
            auto sc = scenario(n, k, p_dbm, 40.0, {4, 8, 12, 16}, kappas[t % 5], 7000 + static_cast<std::uint64_t>(t));
            const PrecoderSolution sol = t % 3 == 0 ? qrzf(sc.channels, sc.profile, sc.cfg)
                                                    : solve_qpcas(sc.channels, sc.profile, sc.cfg);
            const double lb = lower_bound_rates(sol.f, sc.channels.h_hat, sc.channels.r_err, sc.profile,
                                                sc.cfg.p_max, sc.cfg.noise_power)
                                  .sum();
            Rng mc(static_cast<std::uint64_t>(t) ^ 0x9e3779b97f4a7c15ULL);
            const auto e = mc_ergodic_se(sol.f, sc.channels, sc.profile, sc.cfg.p_max, sc.cfg.noise_power, draws, mc);
            ok += lb <= e.mean + 3.0 * e.stderr_ ? 1 : 0;
            worst_gap = std::max(worst_gap, (lb - e.mean) / std::max(e.stderr_, 1e-300));
        }
        const double frac = static_cast<double>(ok) / instances;
        return {frac >= 0.99, fmt("lb <= mc + 3 stderr in %d/%d instances (%.1f%%, need 99%%); worst (lb - mc)/stderr = %.2f",
                                  ok, instances, 100.0 * frac, worst_gap)};
    }

    Outcome kkt_stationarity(const Options &o)
    {
        const int seeds = std::max(10, o.seeds / 2);
        int converged = 0, runs = 0;
        double worst_res = 0.0, worst_grad = 0.0, worst_tau = 0.0;
        double eps = 0.0;
        for (double p_dbm : {20.0, 30.0, 40.0})
            for (int s = 0; s < seeds; ++s)
            {
                auto sc = scenario(16, 4, p_dbm, 40.0, {4, 8, 12, 16}, 0.4, trial_seed(2024, s));
                eps = sc.cfg.eps_gpi;
                const auto sol = solve_qpcas(sc.channels, sc.profile, sc.cfg);
                ++runs;

                // The returned direction solves the reduced problem at mu = 0.
                const auto ch = sc.channels.restrict(sol.active);
                const auto prof = sc.profile.restrict(sol.active);
                const auto pm = PowerModel::make(sc.profile, sc.cfg).restrict(sol.active);
                auto m = assemble_rate_matrices(ch, prof, sol.tau, sc.cfg.p_max, sc.cfg.noise_power, false);
                const CMat w = select_rows(sol.w, sol.active);
                LagrangianSettings ls;
                ls.a = sc.cfg.smoothing_a;
                ls.rho = sc.cfg.indicator_rho;
                ls.p_total = sc.cfg.p_total;
                const auto kw = kkt_weights(w, m, pm, ls);

                if (sol.final_gpi_converged)
                {
                    ++converged;
                    worst_res = std::max(worst_res, stationarity_residual(kw, m, w, SolverPath::dense));
                }

                // dL/dw^* against central differences (which return twice that),
                // scaled by the size of either side of the first-order condition.
                const CMat g = lagrangian_gradient(kw, m, w);
                auto fn = [&](const CMat &x) { return lagrangian_value(x, m, pm, ls).l; };
                const CMat fd = oracle::fd_gradient(fn, w, 1e-6) / 2.0;
                const double scale = apply_a_kkt(kw, m, w).norm() / std::log(2.0);
                worst_grad = std::max(worst_grad, (g - fd).norm() / scale);

                const double tg = tau_gradient(w, m, pm, ls);
                auto ft = [&](double tau)
                {
                    auto mt = m;
                    mt.set_tau(tau);
                    return lagrangian_value(w, mt, pm, ls).l;
                };
                const double h = 1e-6 * sol.tau;
                const double tau_fd = oracle::fd_derivative(ft, std::min(sol.tau, 1.0 - h), h);
                worst_tau = std::max(worst_tau, std::abs(tg - tau_fd) / std::max(std::abs(tau_fd), 1e-3));
            }
        note(fmt("fixed points reached in %d/%d final runs", converged, runs));
        const bool pass = converged > 0 && worst_res <= 10.0 * eps && worst_grad <= 1e-5 && worst_tau <= 1e-5;
        return {pass, fmt("max residual %.2e (tol %.2e) over %d fixed points; grad rel err %.2e, tau-grad rel err %.2e "
                          "(tol 1e-5)",
                          worst_res, 10.0 * eps, converged, worst_grad, worst_tau)};
    }

    Outcome sm_equivalence(const Options &o)
    {
        const int seeds = std::max(10, o.seeds / 2);
        double worst_block = 0.0, worst_se = 0.0;
        for (double p_dbm : {20.0, 30.0, 40.0})
            for (int s = 0; s < seeds; ++s)
            {
                auto sc = scenario(16, 4, p_dbm, 40.0, {4, 8, 12, 16}, 0.4, trial_seed(4048, s));
                sc.cfg.low_complexity = true;
                QpcasOptions opt;
                opt.low_complexity = true;
                const auto sol = solve_qpcas(sc.channels, sc.profile, sc.cfg, opt);
                const auto ch = sc.channels.restrict(sol.active);
                const auto prof = sc.profile.restrict(sol.active);
                const auto pm = PowerModel::make(sc.profile, sc.cfg).restrict(sol.active);
                const auto m = assemble_rate_matrices(ch, prof, sol.tau, sc.cfg.p_max, sc.cfg.noise_power, true);
                LagrangianSettings ls;
                ls.a = sc.cfg.smoothing_a;
                ls.rho = sc.cfg.indicator_rho;
                ls.p_total = sc.cfg.p_total;
                ls.mu = s % 2 ? sol.mu : 0.0;

                const CMat w0 = select_rows(initial_direction(sc.channels, sc.profile, sc.cfg, true), sol.active);
                CMat wd = w0 / w0.norm(), ws = wd;
                for (int it = 0; it < sc.cfg.t_max; ++it)
                {
                    // Same input to both paths, then advance each on its own.
                    const auto kd = kkt_weights(wd, m, pm, ls);
                    const CMat a = gpi_step(kd, m, wd, SolverPath::dense);
                    const CMat b = gpi_step(kd, m, wd, SolverPath::sherman_morrison);
                    for (Eigen::Index c = 0; c < a.cols(); ++c)
                        worst_block = std::max(worst_block, (a.col(c) - b.col(c)).norm());
                    ws = gpi_step(kkt_weights(ws, m, pm, ls), m, ws, SolverPath::sherman_morrison);
                    wd = a;
                }
                const double se_d = rates_from_quadratics(evaluate_quadratics(m, wd)).sum();
                const double se_s = rates_from_quadratics(evaluate_quadratics(m, ws)).sum();
                worst_se = std::max(worst_se, std::abs(se_d - se_s));
            }

        const std::vector<int> sizes{32, 64, 128, 256};
        std::vector<double> lx, ly;
        double reduction_128 = 0.0;
        for (int n : sizes)
        {
            const int reps = n <= 64 ? 400 : (n == 128 ? 100 : 30);
            const auto t = time_gpi_step(n, 4, reps, 11);
            note(fmt("N=%d dense step %.4f ms, SM step %.4f ms, SM solve %.4f ms, dense solve %.4f ms", n, t.dense_ms,
                     t.sm_ms, t.sm_solve_ms, t.dense_solve_ms));
            lx.push_back(std::log(static_cast<double>(n)));
            ly.push_back(std::log(t.sm_solve_ms));
            if (n == 128)
                reduction_128 = 1.0 - t.sm_ms / t.dense_ms;
        }
        const double mx = mean(lx), my = mean(ly);
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i)
        {
            sxy += (lx[i] - mx) * (ly[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        const double slope = sxy / sxx;
        const bool pass = worst_block <= 1e-7 && worst_se <= 1e-3 && slope >= 1.7 && slope <= 2.4 &&
                          reduction_128 >= 0.30;
        return {pass, fmt("per-block dev %.2e (tol 1e-7), SE dev %.2e (tol 1e-3), SM exponent %.2f (in [1.7, 2.4]), "
                          "reduction at N=128 %.0f%% (need 30%%)",
                          worst_block, worst_se, slope, 100.0 * reduction_128)};
    }

    Outcome feasibility(const Options &o)
    {
        const int seeds = std::max(5, o.seeds / 5);
        const Algorithm algs[] = {Algorithm::qpcas, Algorithm::qpcas_low, Algorithm::qpcas_sdma, Algorithm::qgpirs,
                                  Algorithm::qrzf};
        int checked = 0, violations = 0, loose = 0, errors = 0;
        std::map<std::string, int> error_by;
        double worst_over = -1e300;
        auto run = [&](Scenario &sc)
        {
            const auto pm = PowerModel::make(sc.profile, sc.cfg);
            for (Algorithm a : algs)
            {
                PrecoderSolution sol;
                try
                {
                    sol = run_algorithm(a, sc.channels, sc.profile, sc.cfg);
                }
                catch (const InfeasibleBudget &)
                {
                    ++errors;
                    ++error_by[fmt("%s N=%d", algorithm_name(a).c_str(), sc.cfg.n_antennas)];
                    continue;
                }
                ++checked;
                const auto bc = check_power_budget(sol, pm, sc.cfg);
                worst_over = std::max(worst_over, bc.total - sc.cfg.p_total);
                violations += bc.ok ? 0 : 1;
                if (!(sol.tau == 1.0 || std::abs(bc.total - sc.cfg.p_total) <= budget_tolerance_w))
                    ++loose;
            }
        };
        for (int s = 0; s < seeds; ++s)
        {
            for (double p_dbm : {15.0, 20.0, 25.0, 30.0, 35.0, 40.0})
            {
                auto sc = scenario(16, 4, p_dbm, 40.0, {4, 8, 12, 16}, 0.4, trial_seed(99, s));
                run(sc);
            }
            for (double kappa : {0.0, 1.0})
            {
                auto sc = scenario(16, 4, 30.0, 40.0, {4, 8, 12, 16}, kappa, trial_seed(98, s));
                run(sc);
            }
            for (int b : {4, 10, 16})
            {
                auto sc = scenario(32, 4, 40.0, 40.0, {b}, 0.4, trial_seed(97, s));
                run(sc);
            }
            auto tight = scenario(8, 2, 30.0, 32.0, {4, 8}, 0.4, trial_seed(96, s));
            run(tight);
        }
        note(fmt("%d solutions checked, %d infeasible-budget errors", checked, errors));
        for (const auto &[what, n] : error_by)
            note(fmt("  infeasible: %s x%d", what.c_str(), n));
        return {violations == 0 && loose == 0 && checked > 0,
                fmt("%d budget violations, %d solutions neither tight nor at tau = 1, max overshoot %.2e W (tol 1e-9)",
                    violations, loose, worst_over)};
    }

    Outcome trend_dominance(const Options &o)
    {
        const auto cfg = power_sweep_config(o);
        int errors = 0;
        const auto t = tabulate(run_experiment(cfg, o.workers), [](const TrialRecord &r) { return r.p_dbm; }, errors);
        std::string violated;
        for (double p : cfg.p_dbm)
        {
            const auto &qv = t.at("qpcas").at(p), &sv = t.at("qpcas_sdma").at(p);
            const double q = mean(qv), sd = mean(sv), g = mean(t.at("qgpirs").at(p)), z = mean(t.at("qrzf").at(p));
            // Paired standard error of the RSMA gain; seeds are shared across algorithms.
            std::vector<double> diff(qv.size());
            for (std::size_t i = 0; i < qv.size(); ++i)
                diff[i] = qv[i] - sv[i];
            double var = 0.0;
            for (double d : diff)
                var += (d - mean(diff)) * (d - mean(diff));
            const double se = std::sqrt(var / static_cast<double>(diff.size() * (diff.size() - 1)));
            note(fmt("P=%2.0f dBm  qpcas %.3f  qpcas_sdma %.3f (gain %+.3f +- %.3f)  qgpirs %.3f  qrzf %.3f", p, q, sd,
                     q - sd, se, g, z));
            if (!(q >= sd && q >= g && g >= z))
                violated += fmt(" %g", p);
        }
        const bool order = violated.empty();
        auto spread = [&](const std::string &alg)
        {
            std::vector<double> v;
            for (double p : cfg.p_dbm)
                if (p >= 30.0)
                    v.push_back(mean(t.at(alg).at(p)));
            return (*std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end())) / mean(v);
        };
        const double fg = spread("qgpirs"), fz = spread("qrzf");
        const bool flat = fg <= 0.03 && fz <= 0.03;
        return {order && flat && errors == 0,
                fmt("ordering %s; baseline spread over P >= 30 dBm: qgpirs %.1f%%, qrzf %.1f%% (tol 3%%); "
                    "%d seeds, %d error rows",
                    order ? "holds at every P" : ("violated at P =" + violated + " dBm").c_str(), 100.0 * fg,
                    100.0 * fz, o.seeds, errors)};
    }

    Outcome trend_pruning_order(const Options &o)
    {
        ExperimentConfig cfg = power_sweep_config(o);
        cfg.algorithms = {Algorithm::qpcas};
        const auto recs = run_experiment(cfg, o.workers);
        std::vector<double> off(4, 0.0);
        int count = 0;
        for (const auto &r : recs)
        {
            if (r.is_error() || r.p_dbm < 30.0)
                continue;
            ++count;
            for (int g = 0; g < 4; ++g)
                for (int i = 0; i < 4; ++i)
                    off[static_cast<std::size_t>(g)] += r.active_mask[static_cast<std::size_t>(4 * g + i)] == '0' ? 0.25 : 0.0;
        }
        for (auto &v : off)
            v /= std::max(count, 1);
        std::vector<int> rank{0, 1, 2, 3};
        std::sort(rank.begin(), rank.end(), [&](int a, int b) { return off[static_cast<std::size_t>(a)] > off[static_cast<std::size_t>(b)]; });
        const bool pass = count > 0 && rank[0] == 3 && rank[1] == 0;
        return {pass, fmt("deactivated fraction 4/8/12/16-bit = %.2f/%.2f/%.2f/%.2f over %d runs at P >= 30 dBm "
                          "(need 16-bit highest, 4-bit second)",
                          off[0], off[1], off[2], off[3], count)};
    }

    Outcome trend_medium_resolution(const Options &o)
    {
        ExperimentConfig cfg;
        cfg.system.n_users = 4;
        cfg.system.delta_bm = 8.0;
        cfg.n_antennas = {32};
        cfg.bits.clear();
        for (int b = 4; b <= 16; ++b)
            cfg.bits.push_back({b});
        cfg.kappa = {0.4};
        cfg.p_dbm = {40.0};
        cfg.ptot_dbm = 40.0;
        cfg.algorithms = {Algorithm::qpcas};
        cfg.n_trials = o.seeds;
        cfg.seed = 3030;
        cfg.mc_draws = 0;
        int errors = 0;
        const auto t = tabulate(run_experiment(cfg, o.workers), [](const TrialRecord &r) { return std::stod(r.bits); },
                                errors);
        double best = -1.0, best_b = 0.0;
        std::string row;
        for (const auto &[b, v] : t.at("qpcas"))
        {
            row += fmt(" %g:%.3f", b, mean(v));
            if (mean(v) > best)
            {
                best = mean(v);
                best_b = b;
            }
        }
        note("mean sum SE by bits:" + row);
        return {best_b >= 7 && best_b <= 12 && errors == 0,
                fmt("argmax over b = %g bits (need [7, 12]), peak %.3f bits/s/Hz, %d seeds, %d error rows", best_b, best,
                    o.seeds, errors)};
    }

    Outcome trend_convergence(const Options &o)
    {
        std::vector<double> iters, se_drift;
        double mu_tail = 0.0;
        SystemConfig ref;
        for (int s = 0; s < o.seeds; ++s)
        {
            auto sc = scenario(16, 4, 40.0, 40.0, {4, 8, 12, 16}, 0.4, trial_seed(5050, s));
            const auto sol = solve_qpcas(sc.channels, sc.profile, sc.cfg);
            for (const auto &r : sol.rounds)
                iters.push_back(r.iters_f);
            const auto &rs = sol.rounds;
            const std::size_t last = rs.size() - 1;
            for (std::size_t i = last - 4; i < last; ++i)
                mu_tail = std::max(mu_tail, std::abs(rs[i].mu - rs[last].mu));
            se_drift.push_back(std::abs(rs[last].sum_se - rs[last - 5].sum_se) / std::max(rs[last].sum_se, 1e-12));
        }
        const double med = median(iters);
        const double drift = median(se_drift);
        const double mu_tol = ref.delta_bm * std::ldexp(1.0, -(ref.t_mu_max - 6));
        note(fmt("max over rounds of iters_F %.0f, mean %.2f", *std::max_element(iters.begin(), iters.end()), mean(iters)));
        return {med <= 3.0 && mu_tail <= mu_tol && drift <= 1e-2,
                fmt("median iters_F %.1f (need <= 3); mu moves %.2e over the last 5 rounds (tol %.2e); median sum SE "
                    "drift over the last 5 rounds %.2e (tol 1e-2)",
                    med, mu_tail, mu_tol, drift)};
    }

    Outcome trend_csit_robustness(const Options &o)
    {
        ExperimentConfig cfg;
        cfg.system.n_users = 4;
        cfg.n_antennas = {16};
        cfg.bits = {{4, 8, 12, 16}};
        cfg.kappa = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
        cfg.p_dbm = {30.0};
        cfg.ptot_dbm = 40.0;
        cfg.algorithms = {Algorithm::qpcas, Algorithm::qrzf};
        cfg.n_trials = o.seeds;
        cfg.seed = 6060;
        cfg.mc_draws = 0;
        int errors = 0;
        const auto t = tabulate(run_experiment(cfg, o.workers), [](const TrialRecord &r) { return r.kappa; }, errors);
        bool ok = true;
        double margin = 1e300;
        for (double k : cfg.kappa)
        {
            const double q = mean(t.at("qpcas").at(k)), z = mean(t.at("qrzf").at(k));
            note(fmt("kappa=%.1f  qpcas %.3f  qrzf %.3f", k, q, z));
            if (k > 0.0)
            {
                ok = ok && q >= z;
                margin = std::min(margin, q - z);
            }
        }
        return {ok && errors == 0, fmt("min qpcas - qrzf over kappa > 0: %.3f bits/s/Hz; %d seeds, %d error rows", margin,
                                       o.seeds, errors)};
    }

    const std::vector<std::pair<std::string, std::function<Outcome(const Options &)>>> &criteria()
    {
        static const std::vector<std::pair<std::string, std::function<Outcome(const Options &)>>> list{
            {"master_identity", master_identity},
            {"jensen_bound", jensen_bound},
            {"kkt_stationarity", kkt_stationarity},
            {"sm_equivalence", sm_equivalence},
            {"feasibility", feasibility},
            {"trend_dominance", trend_dominance},
            {"trend_pruning_order", trend_pruning_order},
            {"trend_medium_resolution", trend_medium_resolution},
            {"trend_convergence", trend_convergence},
            {"trend_csit_robustness", trend_csit_robustness},
        };
        return list;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"qpcas acceptance checks"};
    std::vector<std::string> selected;
    Options opt;
    opt.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    app.add_option("--criterion", selected, "criterion name (repeatable); default: all");
    app.add_option("--seeds", opt.seeds, "channel draws per sweep point")->check(CLI::PositiveNumber);
    app.add_option("--workers", opt.workers, "worker threads for sweeps")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    for (const auto &name : selected)
    {
        const auto &list = criteria();
        if (std::none_of(list.begin(), list.end(), [&](const auto &c) { return c.first == name; }))
        {
            std::fprintf(stderr, "unknown criterion: %s\n", name.c_str());
            return 2;
        }
    }

    bool all_pass = true;
    for (const auto &[name, fn] : criteria())
    {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), name) == selected.end())
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome r;
        try
        {
            r = fn(opt);
        }
        catch (const std::exception &e)
        {
            r = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %s: %s [%.1f s]\n", r.pass ? "PASS" : "FAIL", name.c_str(), r.detail.c_str(), secs);
        std::fflush(stdout);
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 1;
}
