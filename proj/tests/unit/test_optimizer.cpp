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
#include <doctest.h>

#include "oracles/finite_diff.hpp"
#include "qpcas/baselines.hpp"
#include "qpcas/optimizer.hpp"
#include "support.hpp"

#include <cmath>

using namespace qpcas;
using testing_support::random_direction;
using testing_support::synthetic_instance;

namespace
{
    struct Scenario
    {
        ChannelSet channels;
        QuantizationProfile profile;
        SystemConfig cfg;
    };

    Scenario scenario(int n, int k, double p_dbm, double ptot_dbm, std::uint64_t seed,
                      std::vector<int> levels = {4, 8, 12, 16})
    {
        Scenario s;
        s.cfg.n_antennas = n;
        s.cfg.n_users = k;
        s.cfg.p_max = dbm_to_watt(p_dbm);
        s.cfg.p_total = dbm_to_watt(ptot_dbm);
        ChannelParams params;
        Rng rng(seed);
        const auto geometry = draw_geometry(k, params, rng);
        s.channels = draw_channels(geometry, n, s.cfg.kappa, params, rng);
        s.profile = QuantizationProfile::from_bits(grouped_bits(n, levels));
        return s;
    }
}

TEST_CASE("optimizer - tau gradient matches finite differences")
{
    Rng rng(51);
    SystemConfig cfg;
    cfg.sampling_rate = 1e6;
    int checked = 0;
    for (int t = 0; t < 200; ++t)
    {
        const int n = 4 + t % 4, k = 1 + t % 3;
        const auto inst = synthetic_instance(n, k, 0.4, rng);
        auto m = assemble_rate_matrices(inst.channels, inst.profile, inst.tau, inst.p, inst.noise, t % 2);
        const auto pm = PowerModel::make(inst.profile, cfg);
        LagrangianSettings s;
        s.mu = 0.05 * (t % 7);
        s.a = 0.1;
        s.p_total = 1.0;
        s.with_common = t % 5 != 0;
        const CMat w = random_direction(n, k, rng);
        const double g = tau_gradient(w, m, pm, s);

        auto full = [&](double tau)
        {
            auto mt = m;
            mt.set_tau(tau);
            return lagrangian_value(w, mt, pm, s).l;
        };
        const double h = 1e-6 * inst.tau;
        const double fd = oracle::fd_derivative(full, inst.tau, h);
        CHECK(std::abs(g - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));

        const TauObjective obj(w, m, pm, s);
        CHECK(obj.value(inst.tau) == doctest::Approx(full(inst.tau)).epsilon(1e-12));
        CHECK(obj.value(0.5 * inst.tau) == doctest::Approx(full(0.5 * inst.tau)).epsilon(1e-12));
        ++checked;
    }
    CHECK(checked == 200);
}

TEST_CASE("optimizer - tau ascent limits")
{
    Rng rng(52);
    SystemConfig cfg;
    const auto inst = synthetic_instance(6, 2, 0.4, rng);
    const auto m = assemble_rate_matrices(inst.channels, inst.profile, 0.3, inst.p, inst.noise, false);
    PowerModel pm = PowerModel::make(inst.profile, cfg);
    const CMat w = random_direction(6, 2, rng);

    LagrangianSettings free;
    free.a = 0.1;
    CHECK(tau_gradient(w, m, pm, free) > 0.0);
    const auto up = solve_tau(0.3, w, m, pm, free, cfg);
    CHECK(up.tau == 1.0);

    LagrangianSettings costly = free;
    costly.mu = 1e6;
    const auto down = solve_tau(0.3, w, m, pm, costly, cfg);
    CHECK(down.tau < 0.01);
    CHECK(down.tau >= cfg.tau_min);

    // A start outside the box is projected first.
    CHECK(solve_tau(5.0, w, m, pm, free, cfg).tau == 1.0);
}

TEST_CASE("optimizer - antenna selection rule")
{
    const RVec ones = RVec::Ones(4);
    CMat w = CMat::Ones(4, 3);
    CHECK(count_active(select_antennas(w, ones, 1.0)) == 4);
    CHECK(count_active(select_antennas(w, ones, 0.1)) == 4);

    CMat d = CMat::Zero(4, 3);
    d.row(2).setConstant(1.0);
    d.row(0).setConstant(1e-3);  // relative gain 1e-6
    const auto mask = select_antennas(d, ones, 0.1);
    CHECK(mask == AntennaMask{false, false, true, false});
    CHECK(select_antennas(cplx(0.0, -3.0) * d, ones, 0.1) == mask);

    // The rule is on the effective gain ||w_i||^2 / alpha_i.
    CMat e = CMat::Ones(2, 2);
    CHECK(select_antennas(e, (RVec(2) << 1.0, 0.05).finished(), 0.1) == AntennaMask{false, true});
    CHECK_THROWS_AS(select_antennas(CMat::Zero(3, 2), RVec::Ones(3), 0.1), std::invalid_argument);
}

TEST_CASE("optimizer - multiplier bisection")
{
    double mu = 0.0, delta = 1.0;
    for (int t = 0; t < 20; ++t)
        std::tie(mu, delta) = update_mu_bisection(mu, delta, true);
    CHECK(mu == 0.0);

    mu = 0.0;
    delta = 1.0;
    for (int t = 0; t < 20; ++t)
        std::tie(mu, delta) = update_mu_bisection(mu, delta, false);
    CHECK(mu == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(delta == std::ldexp(1.0, -20));

    mu = 0.0;
    delta = 1.0;
    for (int t = 0; t < 20; ++t)
    {
        std::tie(mu, delta) = update_mu_bisection(mu, delta, t % 2 == 1);
        CHECK(mu >= 0.0);
        CHECK(mu <= 1.0);
    }
}

TEST_CASE("optimizer - direction iteration stops on the step tolerance")
{
    Rng rng(53);
    const auto inst = synthetic_instance(6, 2, 0.4, rng);
    const auto m = assemble_rate_matrices(inst.channels, inst.profile, inst.tau, inst.p, inst.noise, false);
    PowerModel pm = PowerModel::make(inst.profile, SystemConfig{});
    LagrangianSettings s;
    SystemConfig loose;
    loose.eps_gpi = 1e9;
    const auto one = solve_direction(random_direction(6, 2, rng), m, pm, s, loose, SolverPath::dense);
    CHECK(one.iterations == 1);
    CHECK(one.converged);
    CHECK(one.w.norm() == doctest::Approx(1.0));

    SystemConfig capped;
    capped.eps_gpi = 1e-300;
    capped.t_max = 3;
    const auto three = solve_direction(random_direction(6, 2, rng), m, pm, s, capped, SolverPath::dense);
    CHECK(three.iterations == 3);
    CHECK_FALSE(three.converged);
    CHECK_THROWS_AS(solve_direction(CMat::Zero(6, 3), m, pm, s, capped, SolverPath::dense), std::invalid_argument);
}

TEST_CASE("optimizer - solution invariants in the power constrained regime")
{
    for (std::uint64_t seed : {1u, 2u, 3u})
    {
        for (double p_dbm : {20.0, 35.0})
        {
            auto sc = scenario(16, 4, p_dbm, 40.0, seed);
            for (bool low : {false, true})
            {
                sc.cfg.low_complexity = low;
                QpcasOptions opt;
                opt.low_complexity = low;
                const auto sol = solve_qpcas(sc.channels, sc.profile, sc.cfg, opt);
                const auto pm = PowerModel::make(sc.profile, sc.cfg);
                REQUIRE(sol.active.size() == 16);
                CHECK(count_active(sol.active) >= 1);
                for (std::size_t i = 0; i < 16; ++i)
                    if (!sol.active[i])
                    {
                        CHECK(sol.w.row(static_cast<Eigen::Index>(i)).norm() == 0.0);
                        CHECK(sol.f.row(static_cast<Eigen::Index>(i)).norm() == 0.0);
                    }
                CHECK(sol.w.norm() == doctest::Approx(1.0));
                const double total =
                    total_consumption(sol.tau * sc.cfg.p_max, circuit_power(sol.active, pm), sc.cfg.pa_efficiency);
                CHECK(total <= sc.cfg.p_total + 1e-9);
                CHECK(sol.tau <= 1.0);
                CHECK(sol.tau >= sc.cfg.tau_min);
                // Either the budget binds or full power is used.
                CHECK((sol.tau == 1.0 || std::abs(total - sc.cfg.p_total) <= 1e-9));
                CHECK(sol.iters_mu == sc.cfg.t_mu_max);
                CHECK(static_cast<int>(sol.rounds.size()) == sc.cfg.t_mu_max);
                CHECK(sol.mu >= 0.0);
                CHECK(sol.mu <= 2.0 * sc.cfg.delta_bm);
            }
        }
    }
}

TEST_CASE("optimizer - deterministic output")
{
    const auto sc = scenario(8, 2, 30.0, 40.0, 9);
    const auto a = solve_qpcas(sc.channels, sc.profile, sc.cfg);
    const auto b = solve_qpcas(sc.channels, sc.profile, sc.cfg);
    CHECK((a.w - b.w).norm() == 0.0);
    CHECK(a.tau == b.tau);
    CHECK(a.active == b.active);
}

TEST_CASE("optimizer - infeasible budget is reported")
{
    auto sc = scenario(8, 2, 30.0, 40.0, 4);
    sc.cfg.p_total = sc.cfg.circuit.p_lo;
    CHECK_THROWS_AS(solve_qpcas(sc.channels, sc.profile, sc.cfg), InfeasibleBudget);

    // Room for exactly one cheap antenna plus a sliver of transmit power.
    const auto pm = PowerModel::make(sc.profile, sc.cfg);
    sc.cfg.p_total = pm.p_lo + pm.p_ant.minCoeff() + 1e-3;
    const auto sol = solve_qpcas(sc.channels, sc.profile, sc.cfg);
    CHECK(count_active(sol.active) == 1);
    CHECK(total_consumption(sol.tau * sc.cfg.p_max, circuit_power(sol.active, pm), sc.cfg.pa_efficiency) <=
          sc.cfg.p_total + 1e-9);
}

TEST_CASE("optimizer - unconstrained budget keeps full power")
{
    auto sc = scenario(8, 2, 30.0, 80.0, 5);
    const auto sol = solve_qpcas(sc.channels, sc.profile, sc.cfg);
    CHECK(sol.tau == 1.0);
    CHECK(sol.mu == 0.0);
    for (const auto &r : sol.rounds)
        CHECK(r.feasible);

    // With a vanishing selection threshold nothing is pruned and the result
    // matches the power-unaware fixed point.
    sc.cfg.eps_as = 1e-12;
    sc.cfg.t_max = 200;
    sc.cfg.eps_gpi = 1e-8;
    const auto all = solve_qpcas(sc.channels, sc.profile, sc.cfg);
    CHECK(count_active(all.active) == 8);
    const auto ref = qgpirs(sc.channels, sc.profile, sc.cfg);
    const double se_a = lower_bound_rates(all.f, sc.channels.h_hat, sc.channels.r_err, sc.profile, sc.cfg.p_max,
                                          sc.cfg.noise_power)
                            .sum();
    const double se_b = lower_bound_rates(ref.f, sc.channels.h_hat, sc.channels.r_err, sc.profile, sc.cfg.p_max,
                                          sc.cfg.noise_power)
                            .sum();
    CHECK(std::abs(se_a - se_b) <= 1e-2 * std::max(1.0, se_b));
}

TEST_CASE("optimizer - initial direction is a normalized Q-RZF")
{
    const auto sc = scenario(8, 3, 30.0, 40.0, 6);
    const CMat w = initial_direction(sc.channels, sc.profile, sc.cfg, true);
    CHECK(w.norm() == doctest::Approx(1.0));
    CHECK(w.col(0).norm() > 0.0);
    const CMat v = initial_direction(sc.channels, sc.profile, sc.cfg, false);
    CHECK(v.col(0).norm() == 0.0);
}

TEST_CASE("optimizer - median inner loop count")
{
    PrecoderSolution s;
    CHECK(s.median_iters_f() == 0);
    for (int v : {5, 1, 3, 2})
    {
        RoundTrace r;
        r.iters_f = v;
        s.rounds.push_back(r);
    }
    CHECK(s.median_iters_f() == 2);
}
